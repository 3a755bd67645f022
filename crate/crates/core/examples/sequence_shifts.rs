// Finitely supported sequences, shift operators, adjoints, and finite sections.

use framelab::seqspace::{self, OperatorSpec, SeqVec};

pub fn run_example() -> framelab::Result<()> {
    let v = SeqVec::from_real([(1, 1.0), (2, 2.0)])?;
    let right = seqspace::apply(&OperatorSpec::RightShift, &v)?;
    let back = seqspace::apply(&OperatorSpec::LeftShift, &right)?;
    println!("v = {v}\nRv = {right}\nLRv = {back}");
    assert_eq!(back, v);

    let t = OperatorSpec::scaled_left_shift(2f64.sqrt())?;
    let u = OperatorSpec::scaled_right_shift(2f64.sqrt())?;
    let tu = seqspace::apply(&t, &seqspace::apply(&u, &SeqVec::basis(1))?)?;
    println!("(sqrt2 L)(R/sqrt2) e1 = {tu}");

    // <Tx, y> = <x, T* y>
    let x = SeqVec::from_real([(2, 1.0), (3, -1.0)])?;
    let y = SeqVec::from_real([(1, 0.5), (2, 3.0)])?;
    let lhs = seqspace::apply(&t, &x)?.inner(&y);
    let rhs = x.inner(&seqspace::apply(&t.adjoint(), &y)?);
    println!("<Tx,y> = {lhs}, <x,T*y> = {rhs}");

    for dim in [4, 16, 64] {
        println!("|P_{dim} T P_{dim}| = {:.6}", seqspace::finite_section_norm(&t, dim));
    }
    let far = seqspace::power_apply(&u, 40, &SeqVec::basis(1))?;
    println!("U^40 e1 has support {} and norm {:e}", far.max_index(), far.norm());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().expect("sequence shifts example");
}
