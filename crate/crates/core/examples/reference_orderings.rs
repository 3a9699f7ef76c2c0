//! Regenerates the bundled reliability orderings: `cargo run --example reference_orderings -- <dir>`.

use polarlab::construction::{gaussian_reliabilities, REFERENCE_DESIGN_SNR_DB};

fn main() -> polarlab::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "data".into());
    for exp in 3..=10 {
        let n = 1usize << exp;
        let o = gaussian_reliabilities(n, REFERENCE_DESIGN_SNR_DB)?;
        let text = format!(
            "# N = {n}, Gaussian approximation at {REFERENCE_DESIGN_SNR_DB} dB, least reliable first\n{}",
            o.to_text()
        );
        std::fs::write(format!("{dir}/reliability_{n}.txt"), text)?;
    }
    Ok(())
}
