//! The lag-complex logistic map and the sequences derived from its orbit.
//!
//! ```text
//! x' = b·x·(1 − z)
//! y' = b·y·(1 − z)
//! z' = a·x² + y²
//! ```
//!
//! All arithmetic is plain binary64 in the order written above, so that any
//! other implementation following the same order reproduces the orbit bit for
//! bit.

use crate::{Error, Result};

/// Iterations discarded before any value is consumed.
pub const DEFAULT_BURN_IN: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosParams {
    pub a: f64,
    pub b: f64,
}

impl Default for ChaosParams {
    fn default() -> Self {
        Self { a: 1.0, b: 1.99 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ChaosState {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Which map coordinate a [`RealSequence`] was recorded from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealSequence {
    pub values: Vec<f64>,
    pub source: Coordinate,
}

impl RealSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The three coordinate sequences of one orbit segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequences {
    pub x1: RealSequence,
    pub x2: RealSequence,
    pub x3: RealSequence,
}

/// One application of the map.
pub fn step(state: ChaosState, params: ChaosParams) -> Result<ChaosState> {
    let ChaosState { x, y, z } = state;
    let next = ChaosState {
        x: params.b * x * (1.0 - z),
        y: params.b * y * (1.0 - z),
        z: params.a * x * x + y * y,
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NonFiniteState { iteration: 0 })
    }
}

/// Iterates `burn_in` times without recording, then records `length`
/// consecutive states.
pub fn generate_sequences(
    init: ChaosState,
    params: ChaosParams,
    burn_in: usize,
    length: usize,
) -> Result<Sequences> {
    if length == 0 {
        return Err(Error::InvalidLength("at least one value must be requested".into()));
    }
    let mut state = init;
    for i in 0..burn_in {
        state = step(state, params).map_err(|_| Error::NonFiniteState { iteration: i + 1 })?;
    }
    let mut xs = Vec::with_capacity(length);
    let mut ys = Vec::with_capacity(length);
    let mut zs = Vec::with_capacity(length);
    for i in 0..length {
        state = step(state, params).map_err(|_| Error::NonFiniteState {
            iteration: burn_in + i + 1,
        })?;
        xs.push(state.x);
        ys.push(state.y);
        zs.push(state.z);
    }
    Ok(Sequences {
        x1: RealSequence { values: xs, source: Coordinate::X },
        x2: RealSequence { values: ys, source: Coordinate::Y },
        x3: RealSequence { values: zs, source: Coordinate::Z },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulus {
    M256,
    M64,
}

impl Modulus {
    pub const fn value(self) -> u32 {
        match self {
            Modulus::M256 => 256,
            Modulus::M64 => 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSequence {
    pub values: Vec<u8>,
    pub modulus: Modulus,
}

/// Maps one real to `floor((v·10³ − floor(v·10³))·10³) mod m`.
///
/// The fractional part lies in `[0, 1)`, so the intermediate is in `[0, 1000]`
/// even for negative inputs.
pub fn real_to_integer(v: f64, modulus: Modulus) -> Option<u8> {
    if !v.is_finite() {
        return None;
    }
    let scaled = v * 1e3;
    let frac = scaled - scaled.floor();
    let digits = (frac * 1e3).floor() as u32;
    Some((digits % modulus.value()) as u8)
}

pub fn to_integer_sequence(values: &[f64], modulus: Modulus) -> Result<IntegerSequence> {
    let values = values
        .iter()
        .enumerate()
        .map(|(i, &v)| real_to_integer(v, modulus).ok_or(Error::NonFiniteValue(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntegerSequence { values, modulus })
}

/// A permutation of `0..len`, stored as "output slot `k` takes input `perm[k]`".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionSequence(Vec<usize>);

impl PositionSequence {
    /// Validates that `perm` lists every index in `0..perm.len()` once.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation(format!(
                    "index {p} repeated or out of range for length {}",
                    perm.len()
                )));
            }
        }
        Ok(Self(perm))
    }

    pub fn identity(len: usize) -> Self {
        Self((0..len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (k, &p) in self.0.iter().enumerate() {
            inv[p] = k;
        }
        Self(inv)
    }

    /// `out[k] = data[perm[k]]`.
    pub fn apply<T: Copy>(&self, data: &[T]) -> Result<Vec<T>> {
        if data.len() != self.0.len() {
            return Err(Error::BadPermutationLength {
                expected: self.0.len(),
                actual: data.len(),
            });
        }
        Ok(self.0.iter().map(|&p| data[p]).collect())
    }

    /// Undoes [`apply`](Self::apply): `out[perm[k]] = data[k]`.
    pub fn unapply<T: Copy + Default>(&self, data: &[T]) -> Result<Vec<T>> {
        if data.len() != self.0.len() {
            return Err(Error::BadPermutationLength {
                expected: self.0.len(),
                actual: data.len(),
            });
        }
        let mut out = vec![T::default(); data.len()];
        for (k, &p) in self.0.iter().enumerate() {
            out[p] = data[k];
        }
        Ok(out)
    }
}

/// Stable argsort of `values[start..start + len]`.
///
/// Entry `k` of the result is the in-window index of the `k`-th smallest
/// value; equal values keep their original order.
pub fn to_position_sequence(values: &[f64], start: usize, len: usize) -> Result<PositionSequence> {
    let end = start
        .checked_add(len)
        .filter(|&e| e <= values.len())
        .ok_or(Error::WindowOutOfRange {
            start,
            len,
            available: values.len(),
        })?;
    let window = &values[start..end];
    if let Some(i) = window.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue(start + i));
    }
    let mut idx: Vec<usize> = (0..len).collect();
    // Finite values only, so partial_cmp is total here and -0.0 ties with 0.0.
    idx.sort_by(|&i, &j| window[i].partial_cmp(&window[j]).expect("finite"));
    Ok(PositionSequence(idx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const BASE_INIT: ChaosState = ChaosState::new(0.2, 0.4, 0.1);

    #[test]
    fn one_step_from_base_init() {
        let s = step(BASE_INIT, ChaosParams::default()).unwrap();
        assert!((s.x - 0.3582).abs() < 1e-15);
        assert!((s.y - 0.7164).abs() < 1e-15);
        assert!((s.z - 0.2).abs() < 1e-15);

        let s2 = step(s, ChaosParams::default()).unwrap();
        let expected_z = 0.3582f64 * 0.3582 + 0.7164 * 0.7164;
        assert!((s2.z - expected_z).abs() < 1e-14);
        assert!((s2.z - 0.641_536_2).abs() < 1e-9);
    }

    #[test]
    fn origin_is_fixed() {
        let zero = ChaosState::new(0.0, 0.0, 0.0);
        assert_eq!(step(zero, ChaosParams::default()).unwrap(), zero);
    }

    #[test]
    fn divergent_state_is_rejected() {
        let huge = ChaosState::new(1e200, 1e200, -1e200);
        assert!(matches!(
            step(huge, ChaosParams::default()),
            Err(Error::NonFiniteState { .. })
        ));
    }

    #[test]
    fn single_value_equals_one_step() {
        let seqs = generate_sequences(BASE_INIT, ChaosParams::default(), 0, 1).unwrap();
        let s = step(BASE_INIT, ChaosParams::default()).unwrap();
        assert_eq!(seqs.x1.values, vec![s.x]);
        assert_eq!(seqs.x2.values, vec![s.y]);
        assert_eq!(seqs.x3.values, vec![s.z]);
        assert_eq!(seqs.x3.source, Coordinate::Z);
    }

    #[test]
    fn zero_length_is_rejected() {
        assert!(matches!(
            generate_sequences(BASE_INIT, ChaosParams::default(), 1, 0),
            Err(Error::InvalidLength(_))
        ));
    }

    #[test]
    fn base_orbit_stays_finite_for_a_million_steps() {
        let seqs =
            generate_sequences(BASE_INIT, ChaosParams::default(), DEFAULT_BURN_IN, 1_000_000)
                .unwrap();
        for s in [&seqs.x1, &seqs.x2, &seqs.x3] {
            assert_eq!(s.len(), 1_000_000);
            assert!(s.values.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn divergent_orbit_reports_iteration() {
        let err = generate_sequences(ChaosState::new(0.9, 0.9, 0.0), ChaosParams::default(), 10, 100)
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { iteration } if iteration > 1));
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_sequences(BASE_INIT, ChaosParams::default(), 1000, 5000).unwrap();
        let b = generate_sequences(BASE_INIT, ChaosParams::default(), 1000, 5000).unwrap();
        let bits = |s: &RealSequence| s.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.x1), bits(&b.x1));
        assert_eq!(bits(&a.x2), bits(&b.x2));
        assert_eq!(bits(&a.x3), bits(&b.x3));
    }

    #[test]
    fn integer_sequence_examples() {
        assert_eq!(to_integer_sequence(&[0.123456], Modulus::M256).unwrap().values, vec![200]);
        assert_eq!(to_integer_sequence(&[0.123456], Modulus::M64).unwrap().values, vec![8]);
        assert_eq!(to_integer_sequence(&[0.0], Modulus::M64).unwrap().values, vec![0]);
        // Negative inputs: -123.456 has fractional part 0.544 (binary64: 0.54399…).
        assert_eq!(real_to_integer(-0.123456, Modulus::M256), Some((543 % 256) as u8));
        assert!(matches!(
            to_integer_sequence(&[1.0, f64::NAN], Modulus::M256),
            Err(Error::NonFiniteValue(1))
        ));
    }

    #[test]
    fn position_sequence_examples() {
        assert_eq!(to_position_sequence(&[0.5, 0.1, 0.9], 0, 3).unwrap().as_slice(), &[1, 0, 2]);
        assert_eq!(to_position_sequence(&[0.3], 0, 1).unwrap().as_slice(), &[0]);
        assert_eq!(to_position_sequence(&[0.2, 0.2], 0, 2).unwrap().as_slice(), &[0, 1]);
        // Window indices are relative to the window start.
        assert_eq!(
            to_position_sequence(&[9.0, 0.5, 0.1, 0.9], 1, 3).unwrap().as_slice(),
            &[1, 0, 2]
        );
        assert!(matches!(
            to_position_sequence(&[0.1, 0.2], 1, 2),
            Err(Error::WindowOutOfRange { .. })
        ));
    }

    #[test]
    fn permutation_validation() {
        assert!(PositionSequence::new(vec![2, 0, 1]).is_ok());
        assert!(PositionSequence::new(vec![0, 0, 1]).is_err());
        assert!(PositionSequence::new(vec![0, 3, 1]).is_err());
        let p = PositionSequence::new(vec![2, 0, 1]).unwrap();
        assert_eq!(p.apply(&['a', 'b', 'c']).unwrap(), vec!['c', 'a', 'b']);
        assert_eq!(p.unapply(&['c', 'a', 'b']).unwrap(), vec!['a', 'b', 'c']);
        assert_eq!(p.inverse().apply(&['c', 'a', 'b']).unwrap(), vec!['a', 'b', 'c']);
    }

    #[test]
    fn integer_range_on_many_reals() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.random_range(0.0..10.0)).collect();
        assert!(to_integer_sequence(&xs, Modulus::M256).is_ok());
        let z = to_integer_sequence(&xs, Modulus::M64).unwrap();
        assert!(z.values.iter().all(|&v| v < 64));
    }

    proptest! {
        #[test]
        fn argsort_is_a_permutation(values in prop::collection::vec(-10.0f64..10.0, 1..200)) {
            let p = to_position_sequence(&values, 0, values.len()).unwrap();
            prop_assert!(PositionSequence::new(p.as_slice().to_vec()).is_ok());
            let sorted = p.apply(&values).unwrap();
            prop_assert!(sorted.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn apply_then_unapply_is_identity(values in prop::collection::vec(0.0f64..1.0, 1..100)) {
            let p = to_position_sequence(&values, 0, values.len()).unwrap();
            let data: Vec<usize> = (0..values.len()).map(|i| i * 7).collect();
            prop_assert_eq!(p.unapply(&p.apply(&data).unwrap()).unwrap(), data);
        }
    }
}
