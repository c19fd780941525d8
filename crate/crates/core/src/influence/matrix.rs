use serde::Serialize;

use super::SuspendibleProfile;

/// One row of the delegation matrix: the probability of keeping the weight
/// and, for delegating agents, the proxy and forwarding probability.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatrixRow {
    pub diagonal: f64,
    pub forward: Option<(usize, f64)>,
}

/// Row-stochastic matrix of weight flow, stored by row. Each row has at most
/// two nonzero entries.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelegationMatrix {
    rows: Vec<MatrixRow>,
}

impl DelegationMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[MatrixRow] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let r = &self.rows[row];
        match r.forward {
            Some((j, f)) if j == col => f,
            _ if row == col => r.diagonal,
            _ => 0.0,
        }
    }

    pub fn row_sum(&self, row: usize) -> f64 {
        let r = &self.rows[row];
        r.diagonal + r.forward.map_or(0.0, |(_, f)| f)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| (0..self.len()).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Row vector times matrix: `x P`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for (i, (r, &xi)) in self.rows.iter().zip(x).enumerate() {
            out[i] += xi * r.diagonal;
            if let Some((j, f)) = r.forward {
                out[j] += xi * f;
            }
        }
        out
    }
}

/// `P(ii) = 1` for endpoints; `P(ii) = p_i` and `P(i D(i)) = 1 - p_i`
/// otherwise.
pub fn delegation_matrix(sp: &SuspendibleProfile) -> DelegationMatrix {
    let profile = sp.profile();
    let rows = (0..sp.len())
        .map(|i| {
            if profile.is_endpoint(i) {
                MatrixRow { diagonal: 1.0, forward: None }
            } else {
                let p = sp.vote_probability(i);
                MatrixRow { diagonal: p, forward: Some((profile.successor_index(i), 1.0 - p)) }
            }
        })
        .collect();
    DelegationMatrix { rows }
}
