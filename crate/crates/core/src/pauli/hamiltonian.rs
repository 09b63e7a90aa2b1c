use serde::{Deserialize, Serialize};

/// The supported Hamiltonians.
///
/// * `Free`: `p²/2` on one mode.
/// * `SpinDiag`: `a|½⟩⟨½| + c|-½⟩⟨-½|` on a spin-½.
/// * `Trapped`: `(p² + q²)/2 + σ_z` on one mode plus spin.
/// * `Landau`: `(p1² + p2² + q1² + q2²)/2 + (p1 q2 - p2 q1) + σ_z` on two
///   modes plus spin (symmetric gauge, field strength 2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HamiltonianSpec {
    Free,
    SpinDiag { a: f64, c: f64 },
    Trapped,
    Landau,
}

impl HamiltonianSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::SpinDiag { .. } => "spin_diag",
            Self::Trapped => "trapped",
            Self::Landau => "landau",
        }
    }

    /// Spin splitting `a - c` of the diagonal spin term.
    pub fn spin_splitting(&self) -> f64 {
        match self {
            Self::Free => 0.0,
            Self::SpinDiag { a, c } => a - c,
            Self::Trapped | Self::Landau => 2.0,
        }
    }

    /// Coefficient `3(a - c)` of the spin integral term.
    pub fn spin_coefficient(&self) -> f64 {
        3.0 * self.spin_splitting()
    }

    pub fn spatial_modes(&self) -> usize {
        match self {
            Self::SpinDiag { .. } => 0,
            Self::Free | Self::Trapped => 1,
            Self::Landau => 2,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if let Self::SpinDiag { a, c } = self {
            if !(a.is_finite() && c.is_finite()) {
                return Err(crate::Error::Config(format!("spin_diag parameters must be finite (a={a}, c={c})")));
            }
        }
        Ok(())
    }

    /// Generator `G` of the linear flow `dσ/dt = G σ` that transports the
    /// characteristic-function arguments `σ = (μ1, ν1, μ2, ν2)`.
    ///
    /// For one-mode Hamiltonians only the leading 2×2 block is used.
    pub fn frame_generator(&self) -> [[f64; 4]; 4] {
        let mut g = [[0.0; 4]; 4];
        match self {
            Self::SpinDiag { .. } => {}
            Self::Free => {
                g[1][0] = 1.0;
            }
            Self::Trapped => {
                g[0][1] = -1.0;
                g[1][0] = 1.0;
            }
            Self::Landau => {
                // dμ1 = -ν1 - μ2, dν1 = μ1 - ν2, dμ2 = μ1 - ν2, dν2 = ν1 + μ2
                g[0] = [0.0, -1.0, -1.0, 0.0];
                g[1] = [1.0, 0.0, 0.0, -1.0];
                g[2] = [1.0, 0.0, 0.0, -1.0];
                g[3] = [0.0, 1.0, 1.0, 0.0];
            }
        }
        g
    }
}
