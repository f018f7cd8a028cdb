//! Drives the command-line front end in-process with a key=value configuration file.
use winter_nls::cli::main_with_args;

fn main() {
    let dir = std::env::temp_dir().join("winter-nls-example");
    std::fs::create_dir_all(&dir).expect("temporary directory");
    let config = dir.join("spectrum.cfg");
    std::fs::write(&config, "a = 1\nalpha = -4\nformat = json\n").expect("config file");
    let code = main_with_args(["winter-nls", "spectrum", "--config", config.to_str().unwrap()]);
    println!("spectrum exited with {code}");
    let code = main_with_args(["winter-nls", "bifurcation", "--n", "1", "--format", "csv"]);
    println!("bifurcation exited with {code}");
}
