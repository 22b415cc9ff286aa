//! Total-degree and tensor index sets.

use quadsub::indexset::{anisotropic_tensor, tensor, total_degree};

fn main() -> quadsub::Result<()> {
    let td = total_degree(2, 3)?;
    println!("total degree d=2 n=3: {} indices", td.len());
    for k in td.indices() {
        print!(" {k:?}");
    }
    println!();
    for (d, n) in [(2, 20), (5, 5), (10, 2)] {
        println!("T_{n} in {d} dimensions: {}", total_degree(d, n)?.len());
    }
    println!("tensor 3^2: {}", tensor(2, 2)?.len());
    let aniso = anisotropic_tensor(&[1, 3])?;
    println!(
        "anisotropic [1,3]: {} indices, envelope {:?}",
        aniso.len(),
        aniso.envelope()
    );
    Ok(())
}
