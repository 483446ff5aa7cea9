//! One symbol at a time through the whole chain: superposition, fading,
//! imperfect estimates, far-user ML and near-user SIC.

use noma_linklab::channel::{db_to_linear, draw_user_channel};
use noma_linklab::phy::{bpsk_map, ml_detect_far, receive, sic_detect_near, superpose, BitPair, PowerSplit};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> noma_linklab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // with unit noise power the transmit power equals the transmit SNR
    let split = PowerSplit::new(0.2, db_to_linear(25.0))?;
    let (sigma1_sq, sigma2_sq, delta_sq) = (10.0, 1.0, 0.05 * 0.05);

    let trials = 200_000;
    let (mut err1, mut err2) = (0u64, 0u64);
    for i in 0..trials {
        let bits = BitPair::random(&mut rng);
        let x = superpose(bpsk_map(bits.b1), bpsk_map(bits.b2), &split);

        let ch1 = draw_user_channel(sigma1_sq, delta_sq, &mut rng)?;
        let ch2 = draw_user_channel(sigma2_sq, delta_sq, &mut rng)?;
        let y1 = receive(x, &ch1, 1.0, &mut rng)?;
        let y2 = receive(x, &ch2, 1.0, &mut rng)?;

        let near = sic_detect_near(y1, ch1.h_hat, &split);
        let far = ml_detect_far(y2, ch2.h_hat, &split);
        err1 += u64::from(near.b1_hat != bits.b1);
        err2 += u64::from(far != bits.b2);

        if i < 3 {
            println!("trial {i}: sent ({}, {}) near decided {} far decided {}", bits.b1 as u8, bits.b2 as u8, near.b1_hat as u8, far as u8);
        }
    }
    println!("near user BER {:.4e}", err1 as f64 / trials as f64);
    println!("far user BER  {:.4e}", err2 as f64 / trials as f64);
    Ok(())
}
