//! Q-format arithmetic: quantization, rounding and overflow reporting.

use attitude_mpc::fixed_point::{fxp_inner_product, quantize, quantize_slice, FixedFormat};

fn main() -> attitude_mpc::Result<()> {
    let q = FixedFormat::signed(15, 16)?;
    println!("{q}: range [{}, {}], step {}, rounding bound {}", q.min_value(), q.max_value(), q.step(), q.rounding_bound());

    let a = quantize(std::f64::consts::PI, q)?;
    let b = quantize(-0.1, q)?;
    println!("pi  -> raw {:>8} = {}", a.raw(), a.to_f64());
    println!("-0.1 -> raw {:>8} = {}", b.raw(), b.to_f64());
    println!("pi * -0.1 = {}", a.checked_mul(b)?.to_f64());

    let x = quantize_slice(&[0.5, -0.25, 0.125, 1.0 / 3.0], q)?;
    let y = quantize_slice(&[0.1, 0.2, 0.3, 0.4], q)?;
    let r = fxp_inner_product(&x, &y, q)?;
    let exact: f64 = x.iter().zip(&y).map(|(a, b)| a.to_f64() * b.to_f64()).sum();
    println!("x'y = {} (exact on the quantized inputs {exact}, bound {})", r.to_f64(), 4.0 * q.rounding_bound());

    // nothing wraps: the largest value plus one step is an error
    let top = q.from_raw(q.max_raw())?;
    match top.checked_add(q.from_raw(1)?) {
        Ok(v) => println!("unexpected: {}", v.to_f64()),
        Err(e) => println!("max + step: {e}"),
    }
    Ok(())
}
