//! Mask-model parameters: the mask fraction and the 2x2 directional
//! transmissibility matrix.

use crate::error::ModelError;

/// Node label: type 1 wears a mask, type 2 does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeType {
    Masked = 0,
    Unmasked = 1,
}

impl NodeType {
    pub fn index(self) -> usize {
        self as usize
    }

    /// 1-based label as used in output files (1 = masked, 2 = unmasked).
    pub fn label(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_label(label: u8) -> Option<Self> {
        match label {
            1 => Some(NodeType::Masked),
            2 => Some(NodeType::Unmasked),
            _ => None,
        }
    }
}

/// Mask fraction `m` plus the transmissibility matrix.
///
/// `t[i][j]` is the probability that an infected node of type i+1 transmits
/// to a susceptible neighbor of type j+1 (index 0 = masked, 1 = unmasked).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskModelParams {
    pub m: f64,
    pub t: [[f64; 2]; 2],
}

impl MaskModelParams {
    pub fn new(m: f64, t: [[f64; 2]; 2]) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&m) || !m.is_finite() {
            return Err(ModelError::MaskFractionOutOfRange(m));
        }
        for (i, row) in t.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                    return Err(ModelError::TransmissibilityOutOfRange {
                        row: i as u8 + 1,
                        col: j as u8 + 1,
                        value: v,
                    });
                }
            }
        }
        Ok(Self { m, t })
    }

    /// Factored form: baseline transmissibility `t` scaled by the inward
    /// efficiency `t_mask1` (susceptible wears a mask) and the outward
    /// efficiency `t_mask2` (infected wears a mask):
    ///
    ///   T11 = t_mask1 * t_mask2 * t,  T12 = t_mask2 * t,  T22 = t.
    ///
    /// T21 is not pinned down by the factored form; the natural completion
    /// T21 = t_mask1 * t (inward-only protection) is used unless
    /// `t21_override` is given. Note that the default makes T diag(m, 1-m)
    /// rank one.
    pub fn from_factored(
        m: f64,
        t: f64,
        t_mask1: f64,
        t_mask2: f64,
        t21_override: Option<f64>,
    ) -> Result<Self, ModelError> {
        let t21 = t21_override.unwrap_or(t_mask1 * t);
        Self::new(m, [[t_mask1 * t_mask2 * t, t_mask2 * t], [t21, t]])
    }

    /// Transmissibility for an infected node of type `from` contacting a
    /// susceptible node of type `to`.
    pub fn transmissibility(&self, from: NodeType, to: NodeType) -> f64 {
        self.t[from.index()][to.index()]
    }

    /// T diag(m, 1-m), whose spectral radius sets the epidemic threshold.
    pub fn t_m_matrix(&self) -> [[f64; 2]; 2] {
        [
            [self.t[0][0] * self.m, self.t[0][1] * (1.0 - self.m)],
            [self.t[1][0] * self.m, self.t[1][1] * (1.0 - self.m)],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(MaskModelParams::new(1.2, [[0.0; 2]; 2]).is_err());
        assert!(MaskModelParams::new(0.5, [[0.1, 0.2], [0.3, 1.5]]).is_err());
        assert!(MaskModelParams::new(0.5, [[0.1, -0.2], [0.3, 0.5]]).is_err());
    }

    #[test]
    fn factored_form_matches_products() {
        let p = MaskModelParams::from_factored(0.45, 0.6, 0.3, 0.7, None).unwrap();
        assert!((p.t[0][0] - 0.3 * 0.7 * 0.6).abs() < 1e-15);
        assert!((p.t[0][1] - 0.7 * 0.6).abs() < 1e-15);
        assert!((p.t[1][0] - 0.3 * 0.6).abs() < 1e-15);
        assert!((p.t[1][1] - 0.6).abs() < 1e-15);
        // Default completion makes T diag(m, 1-m) singular.
        let tm = p.t_m_matrix();
        let det = tm[0][0] * tm[1][1] - tm[0][1] * tm[1][0];
        assert!(det.abs() < 1e-15);
    }

    #[test]
    fn t21_override_respected() {
        let p = MaskModelParams::from_factored(0.45, 0.6, 0.3, 0.7, Some(0.42)).unwrap();
        assert_eq!(p.t[1][0], 0.42);
    }
}
