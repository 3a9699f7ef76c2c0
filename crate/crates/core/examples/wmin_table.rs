//! Minimum weight and error coefficient of the five schemes at (64,32) and (64,48).

use std::time::Instant;

use polarlab::construction::{build_profile, ReliabilityOrder, Scheme};
use polarlab::precoding::{ConvSpec, CrcSpec};
use polarlab::wmin::{exhaustive_search, WminReport};

fn main() -> polarlab::Result<()> {
    let order = ReliabilityOrder::reference(64)?;
    let crc = CrcSpec::parse("0xE21")?;
    let conv = ConvSpec::from_msb_str("1011011011")?;
    let ks: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let ks = if ks.is_empty() { vec![48, 32] } else { ks };
    println!("{}", WminReport::CSV_HEADER);
    for k in ks {
        for scheme in Scheme::ALL {
            let p = build_profile(
                scheme,
                64,
                k,
                &order,
                Some(crc.clone()),
                Some(conv.clone()),
                8,
            )?;
            let t = Instant::now();
            let r = exhaustive_search(&p, None)?;
            eprintln!("{scheme} ({k}): {:.1}s", t.elapsed().as_secs_f64());
            println!("{}", r.csv_row());
        }
    }
    Ok(())
}
