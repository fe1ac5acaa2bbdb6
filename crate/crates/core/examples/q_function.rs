//! Gaussian tail probability and adaptive quadrature.

use peaky::numerics::{integrate, integrate_semi_infinite, q, QuadratureSpec};

fn main() -> peaky::Result<()> {
    for x in [0.0, 1.0, 3.0, 10.0, 37.0] {
        println!("Q({x:>4}) = {:.16e}", q(x));
    }

    let spec = QuadratureSpec::default();
    let half_gaussian = integrate(|x| (-x * x / 2.0).exp(), 0.0, 8.0, &spec)?;
    println!(
        "int_0^8 exp(-x^2/2) dx = {half_gaussian:.15} (sqrt(pi/2) = {:.15})",
        (std::f64::consts::PI / 2.0).sqrt()
    );

    // Rayleigh-faded BPSK: E[Q(sqrt(2 g snr))] over g ~ Exp(1).
    let snr = 10.0;
    let avg = integrate_semi_infinite(
        |g| q((2.0 * g * snr).sqrt()) * (-g).exp(),
        0.0,
        |g| (-g).exp(),
        &spec,
    )?;
    println!(
        "faded BPSK at P/N0 = 10: {avg:.12e}, closed form {:.12e}",
        0.5 * (1.0 - (snr / (1.0 + snr)).sqrt())
    );
    Ok(())
}
