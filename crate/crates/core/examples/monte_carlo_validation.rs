//! Analytic error probabilities against the simulated transmit-fade-detect chain.

use peaky::analytic::{pe_oobpsk_coherent_avg, pe_ooqpsk_coherent_avg, pe_ooqpsk_noncoherent};
use peaky::channel::FadingSpec;
use peaky::modem::{build_constellation, snr_from_eb_n0_db, Scheme};
use peaky::montecarlo::{simulate, Reception, SimConfig};
use peaky::numerics::QuadratureSpec;

fn main() -> peaky::Result<()> {
    let quad = QuadratureSpec::default();
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let rayleigh = FadingSpec::rayleigh(1.0)?;
    let rician: FadingSpec = "rician:k=5".parse()?;
    let cases = [
        (Scheme::Oobpsk, Reception::Coherent, rayleigh, 0.1),
        (Scheme::Ooqpsk, Reception::Coherent, rayleigh, 0.5),
        (Scheme::Ooqpsk, Reception::Noncoherent, rician, 0.2),
    ];
    for (scheme, reception, channel, nu) in cases {
        for eb in [0.0, 10.0] {
            let n0 = 1.0 / snr_from_eb_n0_db(eb, &build_constellation(scheme, nu, 1.0)?)?;
            let an = match (scheme, reception) {
                (Scheme::Oobpsk, _) => pe_oobpsk_coherent_avg(&channel, nu, 1.0, n0, &quad)?,
                (Scheme::Ooqpsk, Reception::Coherent) => {
                    pe_ooqpsk_coherent_avg(&channel, nu, 1.0, n0, &quad)?
                }
                (Scheme::Ooqpsk, Reception::Noncoherent) => {
                    pe_ooqpsk_noncoherent(&channel.as_rician(), nu, 1.0, n0, &quad)?
                }
            };
            let mc = simulate(&SimConfig {
                scheme,
                nu,
                power: 1.0,
                channel,
                n0,
                reception,
                trials: 2_000_000,
                seed: 1,
                workers,
            })?;
            println!(
                "{reception:<11} {scheme} nu={nu:<3} {eb:>4} dB  analytic {:.5e}  mc {:.5e} [{:.5e}, {:.5e}] {}",
                an.value,
                mc.value,
                mc.ci_low,
                mc.ci_high,
                if mc.contains(an.value) { "ok" } else { "OUTSIDE" }
            );
        }
    }
    Ok(())
}
