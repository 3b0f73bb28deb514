//! Vertex, face and edge counts of the ray meshes, plus an OBJ dump.
//!
//! cargo run --example mesh_levels -- [max_level] [obj_path]

use spherecut::spheremesh::{mesh_at_level, vertex_adjacency};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let max_level: usize = args.next().map(|a| a.parse().expect("level")).unwrap_or(6);
    let obj = args.next();

    println!("{:>5} {:>8} {:>8} {:>8} {:>10}", "level", "vertices", "faces", "edges", "degree");
    let mut last = None;
    for level in 0..=max_level {
        let mesh = mesh_at_level(level)?;
        let adj = vertex_adjacency(&mesh);
        let (lo, hi) = adj.iter().fold((usize::MAX, 0), |(lo, hi), n| (lo.min(n.len()), hi.max(n.len())));
        println!("{level:>5} {:>8} {:>8} {:>8} {:>10}", mesh.vertex_count(), mesh.faces().len(), mesh.edges().len(), format!("{lo}..{hi}"));
        last = Some(mesh);
    }
    if let (Some(path), Some(mesh)) = (obj, last) {
        std::fs::write(&path, mesh.to_obj())?;
        println!("wrote {path}");
    }
    Ok(())
}
