//! MAP detection with the fading realisation known at the receiver.

use peaky::channel::{sample_fading, transmit, FadingSpec};
use peaky::detect::{coherent_thresholds, CoherentDetector};
use peaky::modem::{build_constellation, sample_symbol, Scheme};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> peaky::Result<()> {
    let n0 = 0.2;
    let c = build_constellation(Scheme::Ooqpsk, 0.2, 1.0)?;
    let th = coherent_thresholds(&c, 1.0, n0)?;
    println!("|h| = 1: T = {:?}, T_q = {:?}", th.t, th.t_q().unwrap());

    let det = CoherentDetector::new(&c, n0)?;
    let channel = FadingSpec::rayleigh(1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..8 {
        let (k, x) = sample_symbol(&c, &mut rng);
        let h = sample_fading(&channel, &mut rng);
        let y = transmit(x, h, n0, &mut rng);
        println!(
            "sent {k}  |h|={:.3}  y={:+.3}{:+.3}j  decided {}",
            h.norm(),
            y.re,
            y.im,
            det.detect(y, h)
        );
    }
    Ok(())
}
