//! HiPPO state matrices and the transformations that keep a system
//! orthogonal.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    LegS,
    LegT,
    FouT,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::LegS, Method::LegT, Method::FouT];

    pub fn name(self) -> &'static str {
        match self {
            Method::LegS => "legs",
            Method::LegT => "legt",
            Method::FouT => "fout",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "legs" => Ok(Method::LegS),
            "legt" => Ok(Method::LegT),
            "fout" => Ok(Method::FouT),
            other => Err(invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// A transformation applied after construction, recorded in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Transform {
    Scale(f64),
    Shift(f64),
    UnitaryConjugate,
    DelayReadout,
}

/// Continuous-time system `x' = Ax + Bu`, `y = Cx + Du`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateSystem {
    a: Matrix,
    b: Vec<f64>,
    c: Option<Vec<f64>>,
    d: f64,
    method: Method,
    normalized: bool,
    provenance: Vec<Transform>,
}

impl StateSystem {
    /// Assembles a system from raw parts, checking shapes and finiteness.
    pub fn from_parts(
        a: Matrix,
        b: Vec<f64>,
        c: Option<Vec<f64>>,
        d: f64,
        method: Method,
        normalized: bool,
    ) -> Result<Self> {
        let n = a.require_square()?;
        if n == 0 {
            return Err(invalid("state size must be at least 1"));
        }
        if b.len() != n {
            return Err(Error::Dimension(format!("B has length {}, A is {n}x{n}", b.len())));
        }
        if let Some(c) = &c {
            if c.len() != n {
                return Err(Error::Dimension(format!("C has length {}, A is {n}x{n}", c.len())));
            }
        }
        let finite = a.is_finite()
            && b.iter().all(|x| x.is_finite())
            && c.iter().flatten().all(|x| x.is_finite())
            && d.is_finite();
        if !finite {
            return Err(invalid("system entries must be finite"));
        }
        Ok(Self { a, b, c, d, method, normalized, provenance: Vec::new() })
    }

    /// Builds the HiPPO system for `method`; LegS has no normalized variant.
    pub fn build(method: Method, n: usize, normalized: bool) -> Result<Self> {
        match method {
            Method::LegS if normalized => Err(Error::UnsupportedMethod {
                method: method.to_string(),
                reason: "LegS has no halved variant".into(),
            }),
            Method::LegS => make_legs(n),
            Method::LegT => make_legt(n, normalized),
            Method::FouT => make_fout(n, normalized),
        }
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> Option<&[f64]> {
        self.c.as_deref()
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    pub fn state_size(&self) -> usize {
        self.b.len()
    }

    pub fn provenance(&self) -> &[Transform] {
        &self.provenance
    }

    /// True when no transformation other than a readout has been applied.
    pub fn is_pristine(&self) -> bool {
        self.provenance.iter().all(|t| matches!(t, Transform::DelayReadout))
    }

    pub fn with_readout(mut self, c: Vec<f64>, d: f64) -> Result<Self> {
        if c.len() != self.state_size() {
            return Err(Error::Dimension(format!(
                "C has length {}, state size is {}",
                c.len(),
                self.state_size()
            )));
        }
        if !c.iter().all(|x| x.is_finite()) || !d.is_finite() {
            return Err(invalid("readout entries must be finite"));
        }
        self.c = Some(c);
        self.d = d;
        Ok(self)
    }

    /// Replaces `A`, keeping everything else. Used to build negative controls.
    pub fn with_a(mut self, a: Matrix) -> Result<Self> {
        let n = self.state_size();
        if a.rows() != n || a.cols() != n {
            return Err(Error::Dimension(format!("A must be {n}x{n}")));
        }
        if !a.is_finite() {
            return Err(invalid("A must be finite"));
        }
        self.a = a;
        Ok(self)
    }

    fn transformed(mut self, t: Transform) -> Self {
        self.provenance.push(t);
        self
    }
}

fn require_size(n: usize) -> Result<()> {
    if n == 0 {
        Err(invalid("state size must be at least 1"))
    } else {
        Ok(())
    }
}

fn halve_if(normalized: bool, a: Matrix, b: Vec<f64>) -> (Matrix, Vec<f64>) {
    if normalized {
        (a.scaled(0.5), b.into_iter().map(|x| 0.5 * x).collect())
    } else {
        (a, b)
    }
}

fn legendre_b(n: usize) -> Vec<f64> {
    (0..n).map(|i| ((2 * i + 1) as f64).sqrt()).collect()
}

pub fn make_legs(n: usize) -> Result<StateSystem> {
    require_size(n)?;
    let a = Matrix::from_fn(n, n, |i, k| {
        let r = ((2 * i + 1) as f64).sqrt() * ((2 * k + 1) as f64).sqrt();
        match i.cmp(&k) {
            std::cmp::Ordering::Greater => -r,
            std::cmp::Ordering::Equal => -((i + 1) as f64),
            std::cmp::Ordering::Less => 0.0,
        }
    });
    StateSystem::from_parts(a, legendre_b(n), None, 0.0, Method::LegS, false)
}

pub fn make_legt(n: usize, normalized: bool) -> Result<StateSystem> {
    require_size(n)?;
    let a = Matrix::from_fn(n, n, |i, k| {
        let r = ((2 * i + 1) as f64).sqrt() * ((2 * k + 1) as f64).sqrt();
        if k <= i || (k - i) % 2 == 0 {
            -r
        } else {
            r
        }
    });
    let (a, b) = halve_if(normalized, a, legendre_b(n));
    StateSystem::from_parts(a, b, None, 0.0, Method::LegT, normalized)
}

/// Index `N - 1` of an even-sized FouT system is a cosine with no sine partner.
fn unpaired_cosine(n: usize, i: usize) -> bool {
    n % 2 == 0 && i == n - 1
}

fn fout_entry(n: usize, i: usize, k: usize) -> f64 {
    if unpaired_cosine(n, k) && i != k {
        return 0.0;
    }
    let odd = |x: usize| x % 2 == 1;
    if i == 0 && k == 0 {
        -2.0
    } else if (i == 0 && odd(k)) || (odd(i) && k == 0) {
        -2.0 * SQRT_2
    } else if odd(i) && odd(k) {
        -4.0
    } else if i == k + 1 && odd(k) {
        // sine 2m couples to cosine 2m-1 at frequency 2πm
        PI * i as f64
    } else if k == i + 1 && odd(i) {
        -PI * k as f64
    } else {
        0.0
    }
}

pub fn make_fout(n: usize, normalized: bool) -> Result<StateSystem> {
    require_size(n)?;
    let a = Matrix::from_fn(n, n, |i, k| fout_entry(n, i, k));
    let b = (0..n)
        .map(|i| match i {
            0 => 2.0,
            i if i % 2 == 1 => 2.0 * SQRT_2,
            _ => 0.0,
        })
        .collect();
    let (a, b) = halve_if(normalized, a, b);
    StateSystem::from_parts(a, b, None, 0.0, Method::FouT, normalized)
}

/// Attaches the readout whose kernel approximates a unit delay.
///
/// For FouT the truncated series at the window edge converges to the average
/// of the newest and oldest input, so `D = -1` cancels the newest half.
pub fn delay_readout(sys: StateSystem) -> Result<StateSystem> {
    let n = sys.state_size();
    let (c, d) = match sys.method {
        Method::LegS => {
            return Err(Error::UnsupportedMethod {
                method: sys.method.to_string(),
                reason: "LegS has no finite window to read a delay from".into(),
            })
        }
        Method::LegT => {
            let c = (0..n)
                .map(|i| {
                    let s = ((2 * i + 1) as f64).sqrt();
                    if i % 2 == 0 { s } else { -s }
                })
                .collect();
            (c, 0.0)
        }
        Method::FouT => {
            let c = (0..n)
                .map(|i| match i {
                    0 => 2.0,
                    i if unpaired_cosine(n, i) => 0.0,
                    i if i % 2 == 1 => 2.0 * SQRT_2,
                    _ => 0.0,
                })
                .collect();
            (c, -1.0)
        }
    };
    Ok(sys.with_readout(c, d)?.transformed(Transform::DelayReadout))
}

/// `(cA, cB)`: the same system running `c` times as fast.
pub fn scale(sys: StateSystem, c: f64) -> Result<StateSystem> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(invalid(format!("scale factor must be positive and finite, got {c}")));
    }
    let mut out = sys;
    out.a = out.a.scaled(c);
    out.b.iter_mut().for_each(|x| *x *= c);
    Ok(out.transformed(Transform::Scale(c)))
}

/// `(A + cI, B)`: tilts every kernel by `e^{ct}`.
pub fn shift(sys: StateSystem, c: f64) -> Result<StateSystem> {
    if !c.is_finite() {
        return Err(invalid("shift must be finite"));
    }
    let mut out = sys;
    out.a = out.a.add_identity(c)?;
    Ok(out.transformed(Transform::Shift(c)))
}

const ORTHOGONALITY_TOL: f64 = 1e-10;

/// `(VAVᵀ, VB)` with readout `CVᵀ`, for real orthogonal `V`.
pub fn unitary_conjugate(sys: StateSystem, v: &Matrix) -> Result<StateSystem> {
    let n = sys.state_size();
    if v.rows() != n || v.cols() != n {
        return Err(Error::Dimension(format!(
            "V is {}x{}, state size is {n}",
            v.rows(),
            v.cols()
        )));
    }
    let vt = v.transpose();
    let dev = vt.matmul(v)?.max_abs_diff(&Matrix::identity(n))?;
    if dev > ORTHOGONALITY_TOL {
        return Err(invalid(format!("V is not orthogonal (max |VᵀV - I| = {dev:e})")));
    }
    let mut out = sys;
    out.a = v.matmul(&out.a)?.matmul(&vt)?;
    out.b = v.matvec(&out.b)?;
    if let Some(c) = &out.c {
        out.c = Some(v.matvec(c)?);
    }
    Ok(out.transformed(Transform::UnitaryConjugate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S3: f64 = 1.732_050_807_568_877_2;

    #[test]
    fn legs_small_cases() {
        let s = make_legs(1).unwrap();
        assert_eq!(s.a().to_rows(), vec![vec![-1.0]]);
        assert_eq!(s.b(), &[1.0]);
        let s = make_legs(2).unwrap();
        assert_eq!(s.a().to_rows(), vec![vec![-1.0, 0.0], vec![-S3, -2.0]]);
        assert_eq!(s.b(), &[1.0, S3]);
        assert!(s.c().is_none());
        assert_eq!(s.d(), 0.0);
    }

    #[test]
    fn legs_triangular_structure() {
        let n = 8;
        let a = make_legs(n).unwrap().a().clone();
        for i in 0..n {
            assert_eq!(a[(i, i)], -((i + 1) as f64));
            for k in 0..n {
                if k > i {
                    assert_eq!(a[(i, k)], 0.0);
                } else if k < i {
                    assert!(a[(i, k)] < 0.0);
                }
            }
        }
    }

    #[test]
    fn legt_small_cases() {
        let s = make_legt(2, false).unwrap();
        let want = Matrix::from_rows(&[vec![-1.0, S3], vec![-S3, -3.0]]).unwrap();
        assert!(s.a().max_abs_diff(&want).unwrap() <= 1e-15 * 3.0);
        assert_eq!(s.b(), &[1.0, S3]);
        assert_eq!(make_legt(1, false).unwrap().a().to_rows(), vec![vec![-1.0]]);
        let h = make_legt(2, true).unwrap();
        assert_eq!(h.a(), &s.a().scaled(0.5));
        assert_eq!(h.b(), &[0.5, 0.5 * S3]);
        assert!(h.normalized());
    }

    #[test]
    fn fout_small_cases() {
        let s = make_fout(1, false).unwrap();
        assert_eq!(s.a().to_rows(), vec![vec![-2.0]]);
        assert_eq!(s.b(), &[2.0]);
        let s = make_fout(3, false).unwrap();
        let a = s.a();
        assert_eq!(a[(0, 1)], -2.0 * SQRT_2);
        assert_eq!(a[(1, 1)], -4.0);
        assert_eq!(a[(2, 1)], 2.0 * PI);
        assert_eq!(a[(1, 2)], -2.0 * PI);
        assert_eq!(a[(2, 2)], 0.0);
        assert_eq!(s.b(), &[2.0, 2.0 * SQRT_2, 0.0]);
        assert_eq!(make_fout(4, false).unwrap().b(), &[2.0, 2.0 * SQRT_2, 0.0, 2.0 * SQRT_2]);
    }

    #[test]
    fn fout_second_pair_frequency() {
        let a = make_fout(5, false).unwrap().a().clone();
        assert_eq!(a[(4, 3)], 4.0 * PI);
        assert_eq!(a[(3, 4)], -4.0 * PI);
    }

    #[test]
    fn fout_unpaired_cosine_is_decoupled() {
        let a = make_fout(4, false).unwrap().a().clone();
        for i in 0..3 {
            assert_eq!(a[(i, 3)], 0.0);
        }
        assert_eq!(a[(3, 3)], -4.0);
        assert_eq!(a[(3, 0)], -2.0 * SQRT_2);
        assert_eq!(a[(3, 1)], -4.0);
    }

    #[test]
    fn fout_sparsity() {
        let n = 17;
        let s = make_fout(n, false).unwrap();
        for i in 0..n {
            if i % 2 == 0 && i > 0 {
                assert_eq!(s.b()[i], 0.0);
                let nz = (0..n).filter(|&k| s.a()[(i, k)] != 0.0).count();
                assert!(nz <= 3, "row {i} has {nz} nonzeros");
            }
        }
    }

    #[test]
    fn zero_size_rejected() {
        assert!(make_legs(0).is_err());
        assert!(make_legt(0, false).is_err());
        assert!(make_fout(0, true).is_err());
        assert!(StateSystem::build(Method::LegS, 4, true).is_err());
    }

    #[test]
    fn delay_readouts() {
        let s = delay_readout(make_legt(3, false).unwrap()).unwrap();
        let c = s.c().unwrap();
        assert_eq!(c, &[1.0, -S3, 5f64.sqrt()]);
        assert_eq!(s.d(), 0.0);

        let s = delay_readout(make_fout(1, false).unwrap()).unwrap();
        assert_eq!(s.c().unwrap(), &[2.0]);
        assert_eq!(s.d(), -1.0);

        let s = delay_readout(make_fout(3, false).unwrap()).unwrap();
        assert_eq!(s.c().unwrap(), &[2.0, 2.0 * SQRT_2, 0.0]);
        let s = delay_readout(make_fout(4, false).unwrap()).unwrap();
        assert_eq!(s.c().unwrap()[3], 0.0);

        assert!(matches!(
            delay_readout(make_legs(3).unwrap()),
            Err(Error::UnsupportedMethod { .. })
        ));
    }

    #[test]
    fn scale_and_shift_examples() {
        let s = make_legs(2).unwrap();
        let same = scale(s.clone(), 1.0).unwrap();
        assert_eq!(same.a(), s.a());
        assert_eq!(same.b(), s.b());
        let two = scale(make_legs(1).unwrap(), 2.0).unwrap();
        assert_eq!(two.a().to_rows(), vec![vec![-2.0]]);
        assert_eq!(two.b(), &[2.0]);
        assert!(scale(s.clone(), 0.0).is_err());
        assert!(scale(s.clone(), -1.0).is_err());

        assert_eq!(shift(s.clone(), 0.0).unwrap().a(), s.a());
        let sh = shift(s, 1.0).unwrap();
        assert_eq!(sh.a()[(0, 0)], 0.0);
        assert_eq!(sh.a()[(1, 1)], -1.0);
        assert_eq!(sh.provenance(), &[Transform::Shift(1.0)]);
    }

    #[test]
    fn unitary_examples() {
        let s = delay_readout(make_legt(3, false).unwrap()).unwrap();
        let same = unitary_conjugate(s.clone(), &Matrix::identity(3)).unwrap();
        assert_eq!(same.a(), s.a());
        assert_eq!(same.c(), s.c());

        // swap states 0 and 2
        let p = Matrix::from_rows(&[vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap();
        let legs = make_legs(3).unwrap();
        let q = unitary_conjugate(legs.clone(), &p).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                assert_eq!(q.a()[(i, k)], legs.a()[(2 - i, 2 - k)]);
            }
            assert_eq!(q.b()[i], legs.b()[2 - i]);
        }

        let bad = Matrix::diag(&[1.0, 2.0, 1.0]);
        assert!(unitary_conjugate(legs.clone(), &bad).is_err());
        assert!(unitary_conjugate(legs, &Matrix::identity(2)).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("lagt".parse::<Method>().is_err());
    }

    proptest! {
        #[test]
        fn scale_composes(n in 1usize..12, a in 0.01f64..10.0, b in 0.01f64..10.0) {
            let s = make_legt(n, false).unwrap();
            let twice = scale(scale(s.clone(), a).unwrap(), b).unwrap();
            let once = scale(s, a * b).unwrap();
            let tol = 1e-14 * once.a().max_abs();
            prop_assert!(twice.a().max_abs_diff(once.a()).unwrap() <= tol);
            for (x, y) in twice.b().iter().zip(once.b()) {
                prop_assert!((x - y).abs() <= 1e-14 * y.abs().max(1.0) * 10.0);
            }
        }

        #[test]
        fn shift_composes(n in 1usize..12, a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let s = make_fout(n, false).unwrap();
            let twice = shift(shift(s.clone(), a).unwrap(), b).unwrap();
            let once = shift(s, a + b).unwrap();
            prop_assert!(twice.a().max_abs_diff(once.a()).unwrap() <= 1e-13);
            prop_assert_eq!(twice.b(), once.b());
        }

        #[test]
        fn legt_entries_follow_sign_pattern(n in 1usize..17) {
            let a = make_legt(n, false).unwrap().a().clone();
            for i in 0..n {
                for k in 0..n {
                    let mag = ((2 * i + 1) as f64 * (2 * k + 1) as f64).sqrt();
                    prop_assert!((a[(i, k)].abs() - mag).abs() <= 1e-14 * mag);
                    // A + Aᵀ vanishes off the diagonal where k - i is odd
                    if k > i && (k - i) % 2 == 1 {
                        prop_assert_eq!(a[(i, k)] + a[(k, i)], 0.0);
                    }
                }
            }
        }
    }
}
