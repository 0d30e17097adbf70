//! Bipolar patterns, Hebbian training, structural damage and one-shot
//! threshold decoding.
//!
//! A network is a two-layer autoassociative net over N input and N output
//! units with all-to-all links. Damage never touches the trained weights:
//! severed links and dead input neurons live in masks next to the base
//! matrix, and only the *effective* weight seen by [`SynapticMatrix::decode`]
//! is zeroed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An N-component pattern of +1/−1 units.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "BipolarVectorRaw", into = "BipolarVectorRaw")]
pub struct BipolarVector {
    components: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
struct BipolarVectorRaw {
    components: Vec<i64>,
}

impl TryFrom<BipolarVectorRaw> for BipolarVector {
    type Error = Error;

    fn try_from(raw: BipolarVectorRaw) -> Result<Self> {
        BipolarVector::new(raw.components)
    }
}

impl From<BipolarVector> for BipolarVectorRaw {
    fn from(v: BipolarVector) -> Self {
        BipolarVectorRaw {
            components: v.components.iter().map(|&c| c as i64).collect(),
        }
    }
}

impl BipolarVector {
    /// Builds a pattern, rejecting anything that is not exactly ±1.
    pub fn new(components: impl IntoIterator<Item = i64>) -> Result<Self> {
        let mut out = Vec::new();
        for (index, value) in components.into_iter().enumerate() {
            match value {
                1 => out.push(1i8),
                -1 => out.push(-1i8),
                _ => return Err(Error::InvalidComponent { index, value }),
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidConfig("pattern must have length >= 1".into()));
        }
        Ok(BipolarVector { components: out })
    }

    /// The all-(+1) pattern of length `n`.
    pub fn uniform(n: usize) -> Self {
        BipolarVector {
            components: vec![1; n.max(1)],
        }
    }

    /// Decodes the low `n` bits of `bits` into a pattern: bit set ⇒ +1.
    pub fn from_bits(bits: u32, n: usize) -> Self {
        BipolarVector {
            components: (0..n.max(1))
                .map(|i| if bits >> i & 1 == 1 { 1 } else { -1 })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    pub fn get(&self, i: usize) -> i8 {
        self.components[i]
    }

    pub fn components(&self) -> &[i8] {
        &self.components
    }

    pub fn negated(&self) -> Self {
        BipolarVector {
            components: self.components.iter().map(|c| -c).collect(),
        }
    }

    /// Copy with the component at `i` sign-flipped.
    pub fn with_flipped(&self, i: usize) -> Self {
        let mut components = self.components.clone();
        components[i] = -components[i];
        BipolarVector { components }
    }

    pub(crate) fn set(&mut self, i: usize, value: i8) {
        debug_assert!(value == 1 || value == -1);
        self.components[i] = value;
    }
}

/// How zero net input is resolved during decoding. The shipped default is
/// `RetainInput`, which keeps P(0) = 1 under arbitrary damage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieRule {
    #[default]
    RetainInput,
    ForcePositive,
    ForceNegative,
}

/// A damage configuration: links to sever plus input neurons to kill.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct DamageSpec {
    #[serde(default)]
    pub severed_links: BTreeSet<(usize, usize)>,
    #[serde(default)]
    pub dead_inputs: BTreeSet<usize>,
}

impl DamageSpec {
    pub fn dead(indices: impl IntoIterator<Item = usize>) -> Self {
        DamageSpec {
            severed_links: BTreeSet::new(),
            dead_inputs: indices.into_iter().collect(),
        }
    }

    pub fn severed(links: impl IntoIterator<Item = (usize, usize)>) -> Self {
        DamageSpec {
            severed_links: links.into_iter().collect(),
            dead_inputs: BTreeSet::new(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for &(i, j) in &self.severed_links {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
        }
        for &j in &self.dead_inputs {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, n });
            }
        }
        if self.dead_inputs.len() >= n {
            return Err(Error::AllInputsDead {
                count: self.dead_inputs.len(),
                n,
            });
        }
        Ok(())
    }
}

/// Trained N×N weight grid plus damage masks. Row i is the output neuron,
/// column j the input neuron. Weights are exact integers under the shipped
/// training rules, so decode thresholds are never ambiguous.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SynapticMatrixRaw", into = "SynapticMatrixRaw")]
pub struct SynapticMatrix {
    n: usize,
    weights: Vec<i64>,
    severed: BTreeSet<(usize, usize)>,
    dead_inputs: BTreeSet<usize>,
}

#[derive(Serialize, Deserialize)]
struct SynapticMatrixRaw {
    n: usize,
    weights: Vec<Vec<i64>>,
    #[serde(default)]
    severed: Vec<(usize, usize)>,
    #[serde(default)]
    dead_inputs: Vec<usize>,
}

impl TryFrom<SynapticMatrixRaw> for SynapticMatrix {
    type Error = Error;

    fn try_from(raw: SynapticMatrixRaw) -> Result<Self> {
        let n = raw.n;
        if n == 0 {
            return Err(Error::InvalidConfig("network size must be >= 1".into()));
        }
        if raw.weights.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: raw.weights.len(),
            });
        }
        let mut weights = Vec::with_capacity(n * n);
        for row in &raw.weights {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            weights.extend_from_slice(row);
        }
        let matrix = SynapticMatrix {
            n,
            weights,
            severed: raw.severed.into_iter().collect(),
            dead_inputs: raw.dead_inputs.into_iter().collect(),
        };
        let spec = DamageSpec {
            severed_links: matrix.severed.clone(),
            dead_inputs: matrix.dead_inputs.clone(),
        };
        spec.validate(n)?;
        Ok(matrix)
    }
}

impl From<SynapticMatrix> for SynapticMatrixRaw {
    fn from(m: SynapticMatrix) -> Self {
        SynapticMatrixRaw {
            weights: (0..m.n)
                .map(|i| m.weights[i * m.n..(i + 1) * m.n].to_vec())
                .collect(),
            n: m.n,
            severed: m.severed.into_iter().collect(),
            dead_inputs: m.dead_inputs.into_iter().collect(),
        }
    }
}

impl SynapticMatrix {
    /// Hebbian outer product of a single stored pattern:
    /// `w[i][j] = x_i * x_j`, optionally with the self-link diagonal zeroed.
    pub fn train_hebbian(x: &BipolarVector, zero_diagonal: bool) -> Self {
        let n = x.len();
        let mut weights = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                if zero_diagonal && i == j {
                    continue;
                }
                weights[i * n + j] = (x.get(i) as i64) * (x.get(j) as i64);
            }
        }
        SynapticMatrix {
            n,
            weights,
            severed: BTreeSet::new(),
            dead_inputs: BTreeSet::new(),
        }
    }

    /// Summed Hebbian outer products over several stored patterns. A single
    /// pattern reduces to [`SynapticMatrix::train_hebbian`] with the diagonal
    /// kept. Multi-pattern matrices break the permutation symmetry of the
    /// rank-one rule, which is what makes distinct damage-curve classes
    /// possible.
    pub fn train_multi(patterns: &[BipolarVector]) -> Result<Self> {
        let first = patterns.first().ok_or(Error::EmptyPatternSet)?;
        let n = first.len();
        let mut weights = vec![0i64; n * n];
        for p in patterns {
            if p.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: p.len(),
                });
            }
            for i in 0..n {
                for j in 0..n {
                    weights[i * n + j] += (p.get(i) as i64) * (p.get(j) as i64);
                }
            }
        }
        Ok(SynapticMatrix {
            n,
            weights,
            severed: BTreeSet::new(),
            dead_inputs: BTreeSet::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base_weight(&self, i: usize, j: usize) -> i64 {
        self.weights[i * self.n + j]
    }

    /// Weight actually seen by the decoder: zero across severed links and
    /// dead input columns.
    pub fn effective_weight(&self, i: usize, j: usize) -> i64 {
        if self.dead_inputs.contains(&j) || self.severed.contains(&(i, j)) {
            0
        } else {
            self.weights[i * self.n + j]
        }
    }

    pub fn severed(&self) -> &BTreeSet<(usize, usize)> {
        &self.severed
    }

    pub fn dead_inputs(&self) -> &BTreeSet<usize> {
        &self.dead_inputs
    }

    /// Links not yet removed by damage (directed, diagonal included).
    pub fn present_links(&self) -> Vec<(usize, usize)> {
        let mut links = Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if !self.dead_inputs.contains(&j) && !self.severed.contains(&(i, j)) {
                    links.push((i, j));
                }
            }
        }
        links
    }

    /// Returns a copy with the damage masks extended by `spec`. Base weights
    /// are never mutated, so damage is idempotent and composable.
    pub fn apply_damage(&self, spec: &DamageSpec) -> Result<Self> {
        spec.validate(self.n)?;
        let mut out = self.clone();
        out.severed.extend(spec.severed_links.iter().copied());
        out.dead_inputs.extend(spec.dead_inputs.iter().copied());
        if out.dead_inputs.len() >= self.n {
            return Err(Error::AllInputsDead {
                count: out.dead_inputs.len(),
                n: self.n,
            });
        }
        Ok(out)
    }

    /// One-shot threshold decode: `y_i = sign(Σ_j w_eff(i,j) · v_j)`, with
    /// zero net input resolved by `tie`.
    pub fn decode(&self, v: &BipolarVector, tie: TieRule) -> Result<BipolarVector> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: v.len(),
            });
        }
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let mut field = 0i64;
            for j in 0..self.n {
                field += self.effective_weight(i, j) * (v.get(j) as i64);
            }
            out.push(match field.cmp(&0) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => match tie {
                    TieRule::RetainInput => v.get(i),
                    TieRule::ForcePositive => 1,
                    TieRule::ForceNegative => -1,
                },
            });
        }
        Ok(BipolarVector { components: out })
    }
}

/// Stage-III comparison: componentwise equality against the stored etalon.
pub fn matches_reference(y: &BipolarVector, x: &BipolarVector) -> Result<bool> {
    if y.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(y.components == x.components)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(bits: &[i64]) -> BipolarVector {
        BipolarVector::new(bits.iter().copied()).unwrap()
    }

    #[test]
    fn hebbian_uniform_pattern_gives_all_plus_one() {
        let x = BipolarVector::uniform(9);
        let w = SynapticMatrix::train_hebbian(&x, false);
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(w.base_weight(i, j), 1);
            }
        }
    }

    #[test]
    fn hebbian_is_sign_product() {
        let x = pattern(&[1, -1, 1, 1, -1, -1, 1, -1, 1]);
        let w = SynapticMatrix::train_hebbian(&x, false);
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(w.base_weight(i, j), (x.get(i) * x.get(j)) as i64);
            }
        }
    }

    #[test]
    fn hebbian_zero_diagonal() {
        let x = pattern(&[1, -1, 1, -1, 1]);
        let w = SynapticMatrix::train_hebbian(&x, true);
        for i in 0..5 {
            assert_eq!(w.base_weight(i, i), 0);
            for j in 0..5 {
                if i != j {
                    assert_eq!(w.base_weight(i, j), (x.get(i) * x.get(j)) as i64);
                }
            }
        }
    }

    #[test]
    fn train_multi_single_matches_hebbian() {
        let x = pattern(&[1, -1, -1, 1, 1, -1, 1, 1, -1]);
        assert_eq!(
            SynapticMatrix::train_multi(std::slice::from_ref(&x)).unwrap(),
            SynapticMatrix::train_hebbian(&x, false)
        );
    }

    #[test]
    fn train_multi_doubles_and_cancels_signs() {
        let x = pattern(&[1, -1, 1, -1, 1, -1, 1, -1, 1]);
        let doubled = SynapticMatrix::train_multi(&[x.clone(), x.clone()]).unwrap();
        let opposed = SynapticMatrix::train_multi(&[x.clone(), x.negated()]).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let expect = 2 * (x.get(i) * x.get(j)) as i64;
                assert_eq!(doubled.base_weight(i, j), expect);
                assert_eq!(opposed.base_weight(i, j), expect);
            }
        }
    }

    #[test]
    fn train_multi_rejects_length_mismatch() {
        let err = SynapticMatrix::train_multi(&[BipolarVector::uniform(9), BipolarVector::uniform(5)]);
        assert!(matches!(err, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn empty_damage_is_identity() {
        let w = SynapticMatrix::train_hebbian(&BipolarVector::uniform(9), false);
        let w2 = w.apply_damage(&DamageSpec::default()).unwrap();
        assert_eq!(w, w2);
    }

    #[test]
    fn dead_inputs_zero_whole_columns() {
        let w = SynapticMatrix::train_hebbian(&BipolarVector::uniform(9), false);
        let damaged = w.apply_damage(&DamageSpec::dead([0, 1, 2, 3])).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let expect = if j < 4 { 0 } else { 1 };
                assert_eq!(damaged.effective_weight(i, j), expect);
                // base weights untouched
                assert_eq!(damaged.base_weight(i, j), 1);
            }
        }
    }

    #[test]
    fn severed_link_zeroes_exactly_one_entry() {
        let w = SynapticMatrix::train_hebbian(&BipolarVector::uniform(9), false);
        let damaged = w.apply_damage(&DamageSpec::severed([(2, 5)])).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                let expect = if (i, j) == (2, 5) { 0 } else { 1 };
                assert_eq!(damaged.effective_weight(i, j), expect);
            }
        }
    }

    #[test]
    fn damage_rejects_out_of_range_and_all_dead() {
        let w = SynapticMatrix::train_hebbian(&BipolarVector::uniform(4), false);
        assert!(w.apply_damage(&DamageSpec::severed([(4, 0)])).is_err());
        assert!(w.apply_damage(&DamageSpec::dead([0, 1, 2, 3])).is_err());
    }

    #[test]
    fn decode_recognizes_stored_pattern_and_its_negation() {
        let x = pattern(&[1, -1, 1, 1, -1, -1, 1, -1, 1]);
        let w = SynapticMatrix::train_hebbian(&x, false);
        assert_eq!(w.decode(&x, TieRule::RetainInput).unwrap(), x);
        assert_eq!(
            w.decode(&x.negated(), TieRule::RetainInput).unwrap(),
            x.negated()
        );
    }

    #[test]
    fn all_zero_weights_with_retain_input_echo_the_input() {
        let x = pattern(&[1, -1, 1, -1, 1, 1, -1, -1, 1]);
        let w = SynapticMatrix::train_hebbian(&x, false);
        let all_links: Vec<_> = (0..9).flat_map(|i| (0..9).map(move |j| (i, j))).collect();
        let dead = w.apply_damage(&DamageSpec::severed(all_links)).unwrap();
        let v = pattern(&[-1, 1, 1, -1, -1, 1, 1, -1, 1]);
        assert_eq!(dead.decode(&v, TieRule::RetainInput).unwrap(), v);
        assert_eq!(
            dead.decode(&v, TieRule::ForcePositive).unwrap(),
            BipolarVector::uniform(9)
        );
    }

    #[test]
    fn matches_reference_basics() {
        let x = pattern(&[1, -1, 1]);
        assert!(matches_reference(&x, &x).unwrap());
        assert!(!matches_reference(&x.negated(), &x).unwrap());
        assert!(!matches_reference(&x.with_flipped(1), &x).unwrap());
        assert!(matches_reference(&x, &BipolarVector::uniform(4)).is_err());
    }

    #[test]
    fn matrix_json_round_trip() {
        let x = pattern(&[1, -1, 1, 1, -1, -1, 1, -1, 1]);
        let w = SynapticMatrix::train_hebbian(&x, false)
            .apply_damage(&DamageSpec {
                severed_links: [(0, 3), (7, 7)].into_iter().collect(),
                dead_inputs: [2].into_iter().collect(),
            })
            .unwrap();
        let json = serde_json::to_string(&w).unwrap();
        let back: SynapticMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(w, back);

        let vjson = serde_json::to_string(&x).unwrap();
        assert!(vjson.contains("[1,-1,1,1,-1,-1,1,-1,1]"));
        let vback: BipolarVector = serde_json::from_str(&vjson).unwrap();
        assert_eq!(x, vback);
    }

    #[test]
    fn vector_rejects_non_bipolar_components() {
        assert!(matches!(
            BipolarVector::new([1, 0, -1]),
            Err(Error::InvalidComponent { index: 1, value: 0 })
        ));
        assert!(serde_json::from_str::<BipolarVector>(r#"{"components":[1,2,-1]}"#).is_err());
    }
}
