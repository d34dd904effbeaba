//! Meshes, the curve-splitting of an integration range, and the table of
//! segments holding each curve value.
//!
//! ```text
//! cargo run --release --example mesh_and_curves
//! ```

use vie::{build_v_table, split_at_curves, CurveSet, Mesh};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let curves = CurveSet::proportional(&[1.0 / 8.0, 3.0 / 8.0]);
    let mesh = Mesh::uniform(8, 2.0)?;
    println!("nodes: {:?}", mesh.nodes());

    let t = mesh.node(8);
    println!("breakpoints at t={t}: {:?}", curves.breakpoints(t));
    for seg in split_at_curves(t, 0.0, t, &curves) {
        println!("  [{:.4}, {:.4}] -> branch {}", seg.a, seg.b, seg.piece + 1);
    }

    let v = build_v_table(&mesh, &curves)?;
    for i in 1..=v.curves() {
        let row: Vec<usize> = (1..=mesh.segments()).map(|j| v.get(i, j)).collect();
        println!("v_{i}j = {row:?}");
    }
    Ok(())
}
