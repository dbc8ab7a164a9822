//! Integrands on measured spaces.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::actions::{BorelRegion, Point, SpaceDomain};
use crate::error::{OrbintError, Result};
use crate::groups::GroupElement;
use crate::measures::TestFunction;

pub type ClosureFn = Arc<dyn Fn(&Point) -> Result<Complex64> + Send + Sync>;

#[derive(Clone)]
pub enum Integrand {
    Constant(Complex64),
    /// `e_m(x) = exp(2πi m·x)`.
    Character(Vec<i64>),
    Indicator(BorelRegion),
    /// `|x₀|^{-δ}`, singular at `x₀ = 0`.
    Power { delta: f64 },
    /// `x ↦ x_i` (a bit on the cylinder, a chart coordinate elsewhere).
    Coordinate(usize),
    /// `c + Σ aᵢ xᵢ`.
    Linear { constant: f64, coeffs: Vec<f64> },
    Bump(TestFunction),
    Scaled(Complex64, Box<Integrand>),
    Sum(Vec<Integrand>),
    Product(Vec<Integrand>),
    Closure {
        label: String,
        f: ClosureFn,
        support: Option<Vec<(f64, f64)>>,
        integral: Option<Complex64>,
    },
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integrand::Constant(c) => write!(f, "Constant({c})"),
            Integrand::Character(m) => write!(f, "Character({m:?})"),
            Integrand::Indicator(r) => write!(f, "Indicator({r:?})"),
            Integrand::Power { delta } => write!(f, "Power({delta})"),
            Integrand::Coordinate(i) => write!(f, "Coordinate({i})"),
            Integrand::Linear { constant, coeffs } => write!(f, "Linear({constant}, {} coefficients)", coeffs.len()),
            Integrand::Bump(t) => write!(f, "Bump({t:?})"),
            Integrand::Scaled(c, g) => write!(f, "{c}·{g:?}"),
            Integrand::Sum(v) => f.debug_tuple("Sum").field(v).finish(),
            Integrand::Product(v) => f.debug_tuple("Product").field(v).finish(),
            Integrand::Closure { label, .. } => write!(f, "Closure({label})"),
        }
    }
}

/// `exp(2πiθ)` with `θ` reduced modulo 1 first.
pub fn unit_phase(theta: f64) -> Complex64 {
    let t = theta.rem_euclid(1.0);
    let (s, c) = (2.0 * PI * t).sin_cos();
    Complex64::new(c, s)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl Integrand {
    pub fn constant(c: f64) -> Self {
        Integrand::Constant(real(c))
    }

    pub fn character1(m: i64) -> Self {
        Integrand::Character(vec![m])
    }

    /// `Σ c_m e_m`.
    pub fn trig_polynomial(terms: &[(Vec<i64>, Complex64)]) -> Self {
        Integrand::Sum(
            terms
                .iter()
                .map(|(m, c)| Integrand::Scaled(*c, Box::new(Integrand::Character(m.clone()))))
                .collect(),
        )
    }

    pub fn scaled(c: f64, f: Integrand) -> Self {
        Integrand::Scaled(real(c), Box::new(f))
    }

    pub fn closure(
        label: &str,
        support: Option<Vec<(f64, f64)>>,
        integral: Option<Complex64>,
        f: impl Fn(&Point) -> Result<Complex64> + Send + Sync + 'static,
    ) -> Self {
        Integrand::Closure {
            label: label.to_string(),
            f: Arc::new(f),
            support,
            integral,
        }
    }

    pub fn eval(&self, x: &Point) -> Result<Complex64> {
        match self {
            Integrand::Constant(c) => Ok(*c),
            Integrand::Character(m) => {
                let v = x.as_real().ok_or_else(|| OrbintError::DomainError("characters need real coordinates".into()))?;
                let theta: f64 = m.iter().zip(v).map(|(&k, &xi)| (k as f64 * xi).rem_euclid(1.0)).sum();
                Ok(unit_phase(theta))
            }
            Integrand::Indicator(r) => Ok(real(f64::from(u8::from(r.contains(x))))),
            Integrand::Power { delta } => {
                let v = x.chart();
                let t = v[0].abs();
                if t == 0.0 {
                    return Err(OrbintError::SingularHit(v[0]));
                }
                Ok(real(t.powf(-delta)))
            }
            Integrand::Coordinate(i) => match x {
                Point::Bits(b) => b
                    .get(*i)
                    .map(|&v| real(f64::from(v)))
                    .ok_or_else(|| OrbintError::DomainError(format!("coordinate {i} beyond truncation"))),
                _ => x
                    .chart()
                    .get(*i)
                    .map(|&v| real(v))
                    .ok_or_else(|| OrbintError::DomainError(format!("no coordinate {i}"))),
            },
            Integrand::Linear { constant, coeffs } => {
                let v = match x {
                    Point::Bits(b) => {
                        if b.len() < coeffs.len() {
                            return Err(OrbintError::DomainError("point has too few coordinates".into()));
                        }
                        coeffs.iter().zip(b).filter(|(_, &bit)| bit == 1).map(|(c, _)| c).sum::<f64>()
                    }
                    _ => {
                        let v = x.chart();
                        if v.len() < coeffs.len() {
                            return Err(OrbintError::DomainError("point has too few coordinates".into()));
                        }
                        coeffs.iter().zip(&v).map(|(c, x)| c * x).sum()
                    }
                };
                Ok(real(constant + v))
            }
            Integrand::Bump(t) => Ok(real(match x {
                Point::Real(v) => t.eval(v),
                Point::Element(g) => t.eval_element(g),
                Point::Bits(_) => t.eval(&x.chart()),
            })),
            Integrand::Scaled(c, f) => Ok(*c * f.eval(x)?),
            Integrand::Sum(v) => v.iter().try_fold(Complex64::new(0.0, 0.0), |acc, f| Ok(acc + f.eval(x)?)),
            Integrand::Product(v) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in v {
                    acc *= f.eval(x)?;
                    if acc == Complex64::new(0.0, 0.0) {
                        break;
                    }
                }
                Ok(acc)
            }
            Integrand::Closure { f, .. } => f(x),
        }
    }

    /// Value at a group element viewed as a point of the group.
    pub fn eval_element(&self, g: &GroupElement) -> Result<Complex64> {
        self.eval(&Point::from_element(g))
    }

    /// Chart box outside which the integrand vanishes, when known.
    pub fn support_box(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Integrand::Indicator(r) => match r {
                BorelRegion::Arc { .. } | BorelRegion::Whole => None,
                _ => r.bounding_box(),
            },
            Integrand::Bump(t) if !t.periodic => Some(t.support_box()),
            Integrand::Scaled(_, f) => f.support_box(),
            Integrand::Sum(v) => {
                let boxes: Option<Vec<_>> = v.iter().map(|f| f.support_box()).collect();
                let boxes = boxes?;
                let first = boxes.first()?.clone();
                Some(boxes.iter().skip(1).fold(first, |acc, b| {
                    acc.iter().zip(b).map(|(x, y)| (x.0.min(y.0), x.1.max(y.1))).collect()
                }))
            }
            Integrand::Product(v) => {
                let boxes: Vec<_> = v.iter().filter_map(|f| f.support_box()).collect();
                let first = boxes.first()?.clone();
                Some(boxes.iter().skip(1).fold(first, |acc, b| {
                    acc.iter().zip(b).map(|(x, y)| (x.0.max(y.0), x.1.min(y.1))).collect()
                }))
            }
            Integrand::Closure { support, .. } => support.clone(),
            _ => None,
        }
    }

    /// `∫ f dμ` when it has a closed form on the domain.
    pub fn closed_form_integral(&self, domain: &SpaceDomain) -> Option<Complex64> {
        match self {
            Integrand::Constant(c) => match domain {
                SpaceDomain::Torus(_) | SpaceDomain::Cylinder { .. } => Some(*c),
                _ => None,
            },
            Integrand::Character(m) => match domain {
                SpaceDomain::Torus(_) => Some(real(if m.iter().all(|&k| k == 0) { 1.0 } else { 0.0 })),
                _ => None,
            },
            Integrand::Indicator(r) => {
                let m = r.measure(domain);
                m.is_finite().then(|| real(m))
            }
            Integrand::Power { delta } => match domain {
                SpaceDomain::Torus(1) if *delta < 1.0 => Some(real(1.0 / (1.0 - delta))),
                _ => None,
            },
            Integrand::Coordinate(_) => match domain {
                SpaceDomain::Cylinder { p, .. } => Some(real(*p)),
                SpaceDomain::Torus(_) => Some(real(0.5)),
                _ => None,
            },
            Integrand::Linear { constant, coeffs } => match domain {
                SpaceDomain::Cylinder { p, .. } => Some(real(constant + p * coeffs.iter().sum::<f64>())),
                SpaceDomain::Torus(_) => Some(real(constant + 0.5 * coeffs.iter().sum::<f64>())),
                _ => None,
            },
            Integrand::Bump(t) => match domain {
                SpaceDomain::Cylinder { .. } => None,
                _ => Some(real(t.integral())),
            },
            Integrand::Scaled(c, f) => f.closed_form_integral(domain).map(|v| *c * v),
            Integrand::Sum(v) => v
                .iter()
                .try_fold(Complex64::new(0.0, 0.0), |acc, f| Some(acc + f.closed_form_integral(domain)?)),
            Integrand::Product(v) => {
                // products of characters and constants on the torus
                let SpaceDomain::Torus(d) = domain else { return None };
                let mut coeff = Complex64::new(1.0, 0.0);
                let mut freq = vec![0i64; *d];
                for f in v {
                    match f {
                        Integrand::Constant(c) => coeff *= c,
                        Integrand::Character(m) => freq.iter_mut().zip(m).for_each(|(a, b)| *a += b),
                        _ => return None,
                    }
                }
                Some(if freq.iter().all(|&k| k == 0) { coeff } else { real(0.0) })
            }
            Integrand::Closure { integral, .. } => *integral,
        }
    }

    /// Whether the integrand is built only from nonnegative pieces.
    pub fn is_nonnegative(&self) -> bool {
        match self {
            Integrand::Constant(c) => c.im == 0.0 && c.re >= 0.0,
            Integrand::Indicator(_) | Integrand::Power { .. } => true,
            Integrand::Bump(t) => match t.profile {
                crate::measures::Profile::Lacunary { amplitude, .. } => amplitude.abs() <= 1.0,
                _ => true,
            },
            Integrand::Coordinate(_) => false,
            Integrand::Linear { constant, coeffs } => *constant >= 0.0 && coeffs.iter().all(|&c| c >= 0.0),
            Integrand::Scaled(c, f) => c.im == 0.0 && c.re >= 0.0 && f.is_nonnegative(),
            Integrand::Sum(v) | Integrand::Product(v) => v.iter().all(Integrand::is_nonnegative),
            Integrand::Character(_) | Integrand::Closure { .. } => false,
        }
    }
}
