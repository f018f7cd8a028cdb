//! Branch diagram `(eta, Omega)` of the focusing states for a = 1, alpha = -4, as CSV on stdout.
use winter_nls::stationary::{figure1_dataset, Figure1Options};

fn main() -> winter_nls::Result<()> {
    let data = figure1_dataset(&Figure1Options::default())?;
    println!("branch_label,eta,Omega");
    for row in data.rows() {
        println!("{},{:.16e},{:.16e}", row.branch_label, row.eta, row.omega);
    }
    Ok(())
}
