//! OFF mesh round-trip: write a generated icosphere, read it back, and run
//! the validation that every ingested surface goes through (closedness,
//! consistent winding, outward orientation).
//!
//! Run with:
//!   cargo run --release --example mesh_io

use minnaert::geometry::{enclosed_volume, make_sphere_mesh, read_off, write_off};

fn main() {
    let dir = std::env::temp_dir().join("minnaert_mesh_io");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("icosphere_l2.off");

    let mesh = make_sphere_mesh(1.0, 2).unwrap();
    write_off(&mesh, &path).unwrap();
    println!("wrote {} ({} vertices, {} faces)", path.display(), mesh.vertices.len(), mesh.num_faces());

    let back = read_off(&path).unwrap();
    println!(
        "read back: area = {:.6}, volume = {:.6} (sphere: {:.6}, {:.6})",
        back.total_area(),
        enclosed_volume(&back),
        4.0 * std::f64::consts::PI,
        4.0 * std::f64::consts::PI / 3.0
    );

    let max_dev = back
        .vertices
        .iter()
        .zip(&mesh.vertices)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0_f64, f64::max);
    println!("vertex round-trip deviation: {max_dev:.2e}");
}
