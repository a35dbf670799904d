use std::time::Instant;
use tubecat::{bundled, center};

fn main() {
    for spec in bundled::all() {
        let t0 = Instant::now();
        let alg = center::build_tube_algebra(&spec).unwrap();
        let t1 = t0.elapsed();
        let dec = center::decompose(&alg, 0).unwrap();
        let objs = center::extract_all(&spec, &dec).unwrap();
        let t2 = t0.elapsed();
        let rep = center::verify_center(&spec, &objs, None).unwrap();
        let md = center::modular_data(&spec, &objs).unwrap();
        let t3 = t0.elapsed();
        println!(
            "{:16} dim {:2} simples {} pass {} hex {:.1e} nat {:.1e} sumsq {:.6} D4 {:.6} unitary {:.1e} s2 {:.1e} [{:?} {:?} {:?}]",
            spec.name, alg.dim(), objs.len(), rep.pass(spec.tolerance), rep.hexagon_max, rep.naturality_max,
            rep.sum_qdim_sq, rep.global_dim, md.unitarity_residual, md.s_squared_residual, t1, t2, t3
        );
        println!("   twists {:?}", objs.iter().map(|o| format!("{:.3}", o.twist)).collect::<Vec<_>>());
        println!("   n {:?}", objs.iter().map(|o| o.n.clone()).collect::<Vec<_>>());
    }
}
