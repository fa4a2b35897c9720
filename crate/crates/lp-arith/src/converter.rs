/// Table-based log-linear fraction converter.
///
/// Hardware implements these maps as minimized gate networks; the truth
/// table is identical, so the model stores the exact rounding tables.
/// Forward: lnf -> lf with entry[i] = round((2^(i/2^F) - 1) * 2^F).
/// Inverse: lf -> lnf with entry[j] = round(log2(1 + j/2^F) * 2^F).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConverterTable {
    f_bits: u32,
    forward: Vec<u16>,
    inverse: Vec<u16>,
}

impl ConverterTable {
    pub fn new(f_bits: u32) -> Self {
        assert!((1..=12).contains(&f_bits));
        let size = 1usize << f_bits;
        let scale = size as f64;
        let forward = (0..size)
            .map(|i| (((i as f64 / scale).exp2() - 1.0) * scale).round() as u16)
            .collect();
        let inverse = (0..size)
            .map(|j| ((1.0 + j as f64 / scale).log2() * scale).round() as u16)
            .collect();
        Self {
            f_bits,
            forward,
            inverse,
        }
    }

    pub fn f_bits(&self) -> u32 {
        self.f_bits
    }

    pub fn entries(&self) -> usize {
        self.forward.len()
    }

    /// lnf -> lf, both on the 2^F grid.
    pub fn log_to_linear(&self, lnf: u16) -> u16 {
        self.forward[lnf as usize]
    }

    /// lf -> lnf, both on the 2^F grid.
    pub fn linear_to_log(&self, lf: u16) -> u16 {
        self.inverse[lf as usize]
    }

    /// Grid points where the forward map is injective; the inverse
    /// composed with the forward is the identity exactly on these.
    pub fn injective_points(&self) -> Vec<u16> {
        let mut hits = vec![0u8; self.entries()];
        for &v in &self.forward {
            hits[v as usize] = hits[v as usize].saturating_add(1);
        }
        (0..self.entries() as u16)
            .filter(|&i| hits[self.forward[i as usize] as usize] == 1)
            .collect()
    }

    /// Test hook: build a table with explicit entries (e.g. corrupted ones)
    /// so integrity checks can be exercised.
    pub fn from_entries(f_bits: u32, forward: Vec<u16>, inverse: Vec<u16>) -> Self {
        assert_eq!(forward.len(), 1usize << f_bits);
        assert_eq!(inverse.len(), 1usize << f_bits);
        Self {
            f_bits,
            forward,
            inverse,
        }
    }
}

impl Default for ConverterTable {
    fn default() -> Self {
        Self::new(8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_zero() {
        let t = ConverterTable::default();
        assert_eq!(t.log_to_linear(0), 0);
        assert_eq!(t.linear_to_log(0), 0);
    }

    #[test]
    fn half_maps_to_sqrt2() {
        // (2^0.5 - 1) * 256 = 106.04 -> 106;  log2(362/256) * 256 -> 128
        let t = ConverterTable::default();
        assert_eq!(t.log_to_linear(128), 106);
        assert_eq!(t.linear_to_log(106), 128);
    }

    #[test]
    fn forward_error_within_half_ulp() {
        let t = ConverterTable::default();
        let mut max_err: f64 = 0.0;
        for i in 0..256u16 {
            let lf = f64::from(t.log_to_linear(i)) / 256.0;
            let exact = (f64::from(i) / 256.0).exp2();
            max_err = max_err.max(((1.0 + lf) - exact).abs());
        }
        assert!(max_err <= 2f64.powi(-9), "max err {max_err}");
    }

    #[test]
    fn round_trip_on_injective_points() {
        let t = ConverterTable::default();
        let inj = t.injective_points();
        // 44 low entries collide pairwise where the forward slope < 1
        assert_eq!(inj.len(), 212);
        for i in inj {
            assert_eq!(t.linear_to_log(t.log_to_linear(i)), i, "lnf {i}");
        }
    }
}
