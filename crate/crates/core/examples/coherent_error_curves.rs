//! Rayleigh-averaged symbol error probability against Eb/N0 for several duty factors.

use peaky::analytic::{pe_oobpsk_coherent_avg, pe_ooqpsk_coherent_avg};
use peaky::channel::FadingSpec;
use peaky::modem::{build_constellation, snr_from_eb_n0_db, Scheme};
use peaky::numerics::QuadratureSpec;

fn main() -> peaky::Result<()> {
    let channel = FadingSpec::rayleigh(1.0)?;
    let quad = QuadratureSpec::default();
    let nus = [1.0, 0.5, 0.2, 0.1];
    for scheme in [Scheme::Oobpsk, Scheme::Ooqpsk] {
        println!("{scheme}, coherent Rayleigh");
        print!("Eb/N0");
        for nu in nus {
            print!("  nu={nu:<8}");
        }
        println!();
        for eb in (0..=40).step_by(5) {
            print!("{eb:>5}");
            for nu in nus {
                let n0 =
                    1.0 / snr_from_eb_n0_db(eb as f64, &build_constellation(scheme, nu, 1.0)?)?;
                let pe = match scheme {
                    Scheme::Oobpsk => pe_oobpsk_coherent_avg(&channel, nu, 1.0, n0, &quad)?,
                    Scheme::Ooqpsk => pe_ooqpsk_coherent_avg(&channel, nu, 1.0, n0, &quad)?,
                };
                print!("  {:.4e}", pe.value);
            }
            println!();
        }
    }
    Ok(())
}
