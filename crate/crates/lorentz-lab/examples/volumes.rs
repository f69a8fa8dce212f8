//! Exact Lorentz-ball volumes and the volume-radius asymptotics.
//!
//! Run with: cargo run --release --example volumes

use lorentz_lab::qindex::QIndex;
use lorentz_lab::volume::{ball_volume, volume_radius_asymptotic};

fn main() {
    println!("{:>6} {:>6} {:>16} {:>14} {:>14}", "q", "n", "volume", "radius", "radius/limit");
    for q in [QIndex::Finite(1.5), QIndex::Finite(2.0), QIndex::Finite(4.0), QIndex::Infinite] {
        for n in [2usize, 8, 64, 1024, 100_000] {
            let v = ball_volume(q, n);
            let radius = v.radius(n);
            let limit = volume_radius_asymptotic(q, n);
            let vol = if n <= 64 { format!("{:.8e}", v.log_volume.exp()) } else { format!("e^{:.2}", v.log_volume) };
            println!("{:>6} {:>6} {:>16} {:>14.8} {:>14.6}", q, n, vol, radius, radius / limit);
        }
    }
}
