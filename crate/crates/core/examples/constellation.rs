//! On-off PSK constellations and the SNR-per-bit bookkeeping.

use peaky::modem::{build_constellation, eb_n0_db, entropy_bits, Scheme};

fn main() -> peaky::Result<()> {
    for scheme in [Scheme::Oobpsk, Scheme::Ooqpsk] {
        for nu in [1.0, 0.5, 0.1] {
            let c = build_constellation(scheme, nu, 1.0)?;
            println!(
                "{scheme} nu={nu:<4} PAR={:>5.1} H={:.4} bits  P/N0=10 dB -> Eb/N0={:.3} dB",
                c.peak_to_average_ratio(),
                entropy_bits(&c),
                eb_n0_db(1.0, 0.1, &c)?
            );
            for p in c.points() {
                println!(
                    "    {:>8.4} {:+8.4}j  p={:.4}",
                    p.amplitude.re, p.amplitude.im, p.prior
                );
            }
        }
    }
    Ok(())
}
