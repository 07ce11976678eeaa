//! Checks that J1..J16 partition Ŝ inside the truncation window, and shows
//! what the printed J11 bound would do.

use starcc::regions::{
    partition_audit, partition_audit_of, region_def, region_def_printed_j11, truncation_window, RegionId,
};

fn main() {
    let window = truncation_window(10.0);
    let r = partition_audit(1_000_000, &window);
    println!(
        "{} samples in Ŝ: {} in exactly one region, {} in two, {} uncovered",
        r.in_domain, r.exactly_one, r.multiple, r.uncovered
    );
    for (id, n) in &r.per_region {
        println!("  {id:>4}: {n}");
    }

    let printed: Vec<_> = RegionId::SUBREGIONS
        .iter()
        .map(|&id| if id == RegionId::J11 { region_def_printed_j11() } else { region_def(id) })
        .collect();
    let p = partition_audit_of(&printed, 1_000_000, &window);
    println!("with J11 as printed: {} points in two regions, e.g. {:?}", p.multiple, p.anomalies.first());
}
