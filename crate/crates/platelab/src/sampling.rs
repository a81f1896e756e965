//! Seeded sampling helpers.

use rand::Rng;
use rand_distr::StandardNormal;

/// Uniform point on the unit sphere of `R^dim`.
pub fn unit_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    if dim == 0 {
        return Vec::new();
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point in the unit ball of `R^dim`.
pub fn unit_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    let s = unit_sphere(rng, dim);
    let r: f64 = rng.gen::<f64>().powf(1.0 / dim.max(1) as f64);
    s.into_iter().map(|x| x * r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sphere_points_have_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for d in 1..5 {
            let v = unit_sphere(&mut rng, d);
            assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(unit_ball(&mut rng, d).iter().map(|x| x * x).sum::<f64>() <= 1.0);
        }
    }
}
