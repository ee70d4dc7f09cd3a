//! Bundled presentations of PSL(2, O_d), generator matrices and peripheral
//! systems for the supported discriminants.

use crate::ring::{ProjMatrix, QuadIdeal};

use super::{FpError, Presentation, Word};

pub const SUPPORTED_D: [i64; 14] = [1, 2, 3, 5, 6, 7, 11, 15, 19, 23, 31, 39, 47, 71];

/// Presentation, matrices and cusp data for one Bianchi group.
#[derive(Clone, Debug)]
pub struct BianchiData {
    pub d: i64,
    pub presentation: Presentation,
    /// Matrix of each generator, entries in the basis {1, ω_d}.
    pub matrices: Vec<ProjMatrix>,
    /// Per cusp class (p1, p2) generating the parabolic subgroup.
    pub peripherals: Vec<(Word, Word)>,
    /// Extra generators of the cusp stabilizer at infinity (ℓ for d = 1, 3).
    pub stabilizer_extra: Vec<Word>,
    /// The B(I) recipe takes one triple used for every cusp class.
    pub shared_triple: bool,
    /// d = 3: u is [[1, ω²],[0,1]] and certificate triples refer to ω².
    pub omega_squared: bool,
}

impl BianchiData {
    pub fn names(&self) -> &[String] {
        &self.presentation.names
    }

    pub fn ngens(&self) -> usize {
        self.presentation.ngens()
    }

    pub fn cusp_classes(&self) -> usize {
        self.peripherals.len()
    }

    pub fn word(&self, text: &str) -> Result<Word, FpError> {
        self.presentation.parse_word(text)
    }

    /// Evaluates a word as an exact matrix over O_d.
    pub fn evaluate(&self, w: &Word) -> ProjMatrix {
        let inv: Vec<ProjMatrix> = self.matrices.iter().map(|m| m.inverse()).collect();
        w.evaluate(&self.matrices, &inv, ProjMatrix::identity(self.d), |x, y| *x * *y)
    }

    /// Evaluates a word modulo I, reducing after every multiplication.
    pub fn evaluate_mod(&self, w: &Word, ideal: &QuadIdeal) -> ProjMatrix {
        let m: Vec<ProjMatrix> = self.matrices.iter().map(|x| x.reduce(ideal)).collect();
        let inv: Vec<ProjMatrix> = self.matrices.iter().map(|x| x.inverse().reduce(ideal)).collect();
        w.evaluate(&m, &inv, ProjMatrix::identity(self.d), |x, y| (*x * *y).reduce(ideal))
    }

    /// Generators of the cusp stabilizer of class `i`.
    pub fn stabilizer_words(&self, i: usize) -> Vec<Word> {
        let (p1, p2) = &self.peripherals[i];
        let mut v = vec![p1.clone(), p2.clone()];
        if i == 0 {
            v.extend(self.stabilizer_extra.iter().cloned());
        }
        v
    }
}

type M = [[i64; 2]; 4];

const A: M = [[0, 0], [-1, 0], [1, 0], [0, 0]];
const T: M = [[1, 0], [1, 0], [0, 0], [1, 0]];
const U: M = [[1, 0], [0, 1], [0, 0], [1, 0]];

struct Raw {
    names: &'static [&'static str],
    matrices: &'static [M],
    relators: &'static [&'static str],
    peripherals: &'static [(&'static str, &'static str)],
    extra: &'static [&'static str],
    shared_triple: bool,
}

fn raw(d: i64) -> Option<Raw> {
    let r = match d {
        1 => Raw {
            names: &["a", "l", "t", "u"],
            matrices: &[A, [[0, -1], [0, 0], [0, 0], [0, 1]], T, U],
            relators: &[
                "a^2", "l^2", "(t*l)^2", "(u*l)^2", "(a*l)^2", "(t*a)^3", "(u*a*l)^3", "(t,u)",
            ],
            peripherals: &[("t", "u")],
            extra: &["l"],
            shared_triple: false,
        },
        2 => Raw {
            names: &["a", "t", "u"],
            matrices: &[A, T, U],
            relators: &["a^2", "(t*a)^3", "(a*u^-1*a*u)^2", "(t,u)"],
            peripherals: &[("t", "u")],
            extra: &[],
            shared_triple: false,
        },
        3 => Raw {
            names: &["a", "l", "t", "u"],
            matrices: &[
                A,
                [[0, -1], [0, 0], [0, 0], [-1, 1]],
                T,
                [[1, 0], [-1, 1], [0, 0], [1, 0]],
            ],
            relators: &[
                "(t,u)",
                "a^2",
                "(a*l)^2",
                "(t*a)^3",
                "l^3",
                "(u*a*l)^3",
                "l^-1*t*l*u*t",
                "l^-1*u*l*t^-1",
            ],
            peripherals: &[("t", "u")],
            extra: &["l"],
            shared_triple: false,
        },
        5 => Raw {
            names: &["a", "b", "c", "t", "u"],
            matrices: &[
                A,
                [[0, -1], [2, 0], [2, 0], [0, 1]],
                [[-4, -1], [0, -2], [0, 2], [-4, 1]],
                T,
                U,
            ],
            relators: &[
                "(t,u)",
                "a^2",
                "b^2",
                "(t*a)^3",
                "(a*b)^2",
                "(a*u*b*u^-1)^2",
                "a*c*a*t*c^-1*t^-1",
                "u*b*u^-1*c*b*t*c^-1*t^-1",
            ],
            peripherals: &[("t", "u"), ("t*b", "t*u^-1*c*t^-1")],
            extra: &[],
            shared_triple: true,
        },
        6 => Raw {
            names: &["a", "t", "u", "b", "c"],
            matrices: &[
                A,
                T,
                U,
                [[-1, -1], [2, -1], [2, 0], [1, 1]],
                [[5, 0], [0, -2], [0, 2], [5, 0]],
            ],
            relators: &[
                "a^2",
                "b^2",
                "(t,u)",
                "(t*a)^3",
                "(a,c)",
                "t^-1*c*t*u*b*u^-1*c^-1*b^-1",
                "(a*t*b)^3",
                "(a*t*u*b*u^-1)^3",
            ],
            peripherals: &[("t", "u"), ("t*b", "(c*u)^-1")],
            extra: &[],
            shared_triple: true,
        },
        7 => Raw {
            names: &["a", "t", "u"],
            matrices: &[A, T, U],
            relators: &["a^2", "(t*a)^3", "(a*t*u^-1*a*u)^2", "(t,u)"],
            peripherals: &[("t", "u")],
            extra: &[],
            shared_triple: false,
        },
        11 => Raw {
            names: &["a", "t", "u"],
            matrices: &[A, T, U],
            relators: &["a^2", "(t*a)^3", "(a*t*u^-1*a*u)^3", "(t,u)"],
            peripherals: &[("t", "u")],
            extra: &[],
            shared_triple: false,
        },
        15 => Raw {
            names: &["a", "c", "t", "u"],
            matrices: &[A, [[4, 0], [1, -2], [-1, 2], [4, 0]], T, U],
            relators: &[
                "(t,u)",
                "(a,c)",
                "a^2",
                "(t*a)^3",
                "u*c*u*a*t*u^-1*c^-1*u^-1*a*t^-1",
            ],
            peripherals: &[("t", "u"), ("u*c*a", "c^-1*a*u^-1*c^-1*u^-1*t*a")],
            extra: &[],
            shared_triple: false,
        },
        19 => Raw {
            names: &["a", "b", "t", "u"],
            matrices: &[A, [[1, -1], [2, 0], [2, 0], [0, 1]], T, U],
            relators: &[
                "a^2",
                "(t*a)^3",
                "b^3",
                "(b*t^-1)^3",
                "(a*b)^2",
                "(a*t^-1*u*b*u^-1)^2",
                "(t,u)",
            ],
            peripherals: &[("t", "u")],
            extra: &[],
            shared_triple: false,
        },
        23 => Raw {
            names: &["g1", "g2", "g3", "g4", "g5"],
            matrices: &[
                [[1, 0], [-1, 1], [0, 0], [1, 0]],
                T,
                [[0, 0], [1, 0], [-1, 0], [1, 0]],
                [[3, 1], [-4, 1], [-2, 1], [-1, -1]],
                [[5, -1], [1, 2], [2, 1], [-3, 1]],
            ],
            relators: &[
                "g3^3",
                "(g3*g2)^2",
                "(g1,g2)",
                "(g4,g5)",
                "g5*g2^-1*g3^-1*g5^-1*g1^-1*g2^-1*g3^-1*g1",
                "g4^-1*g5*g3*g2*g5^-1*g2*g4*g3",
            ],
            peripherals: &[("g2", "g1"), ("g4", "g5"), ("g4*g3*g2", "g2^-1*g5*g3*g2")],
            extra: &[],
            shared_triple: false,
        },
        31 => Raw {
            names: &["g1", "g2", "g3", "g4", "g5"],
            matrices: &[
                [[1, 0], [-1, 0], [0, 0], [1, 0]],
                [[0, 0], [1, 0], [-1, 0], [1, 0]],
                U,
                [[3, 0], [-2, 2], [0, 1], [-5, 0]],
                [[3, -2], [7, 1], [4, 0], [-1, 2]],
            ],
            relators: &[
                "(g1,g3)",
                "g2^3",
                "(g2*g1^-1)^2",
                "(g5,g4)",
                "g4*g1^-1*g3^-1*g2*g3*g4^-1*g2*g4*g3^-1*g1^-1*g2*g3*g4^-1*g2",
                "g5*g3^-1*g2*g3*g4^-1*g2*g1^-1*g5^-1*g2^-1*g4*g3^-1*g2^-1*g3*g1",
                "g2*g3*g4^-1*g2*g1^-1*g4*g3^-1*g2*g3*g4^-1*g1*g2^-1*g4*g3^-1",
            ],
            peripherals: &[("g1", "g3"), ("g4", "g5"), ("g1*g5", "g3^-1*g2*g3*g4^-1*g2*g5")],
            extra: &[],
            shared_triple: false,
        },
        39 => Raw {
            names: &["g1", "g2", "g3", "g4", "g5", "g6", "g7"],
            matrices: &[
                T,
                U,
                [[0, 0], [1, 0], [-1, 0], [1, 0]],
                [[-3, -1], [7, -2], [2, -1], [5, 1]],
                [[3, -1], [2, 1], [3, 0], [-1, 1]],
                [[7, -1], [2, 3], [2, 1], [-5, 1]],
                [[6, -1], [-1, 2], [1, -2], [5, 1]],
            ],
            relators: &[
                "g3^3",
                "(g4,g6)",
                "(g3*g5)^2",
                "(g2,g1)",
                "(g1^-1*g3^-1)^2",
                "(g3^-1,g7^-1)",
                "(g5^-1*g1)^3",
                "g5^-1*g1*g6^-1*g4^-1*g5*g4*g1^-1*g6",
                "g4^-1*g5*g4*g2^-1*g7*g5^-1*g7^-1*g2",
                "(g7*g5^-1*g7^-1*g1)^3",
                "g6*g1^-1*g5*g6^-1*g4^-1*g5*g4*g1^-1*g4^-1*g5*g4*g1^-1",
            ],
            peripherals: &[
                ("g1", "g2"),
                ("g4", "g6"),
                ("g5^-1*g6", "g4*g1^-1*g6"),
                ("g5", "g4*g2^-1*g7"),
            ],
            extra: &[],
            shared_triple: false,
        },
        47 => Raw {
            names: &["g1", "g2", "g3", "g4", "g5", "g6", "g7"],
            matrices: &[
                [[-1, 0], [1, 0], [-1, 0], [0, 0]],
                T,
                [[1, 0], [-1, 1], [0, 0], [1, 0]],
                [[-2, 1], [5, 0], [-3, 0], [1, 1]],
                [[5, 0], [-3, 3], [0, 1], [-7, 0]],
                [[-4, 1], [3, 1], [-3, -1], [-4, 1]],
                [[1, -2], [11, 1], [4, 0], [-3, 2]],
            ],
            relators: &[
                "g1^3",
                "(g3,g2)",
                "(g2^-1*g1)^2",
                "(g5,g7)",
                "g2^-1*g1*g6*g1^-1*g2*g6^-1",
                "g6*g2^-1*g4^-1*g5*g3^-1*g6^-1*g4*g2*g3*g5^-1",
                "g7^-1*g2^-1*g5^-1*g4*g1*g4^-1*g2*g7*g4*g1^-1*g4^-1*g5",
                "g3*g5^-1*g4*g1*g4^-1*g2*g5*g3^-1*g2^-1*g4^-1*g1^-1*g4",
                "g5^-1*g4*g1*g4^-1*g7^-1*g2^-1*g4*g1^-1*g4^-1*g5*g3^-1*g2*g3*g7",
            ],
            peripherals: &[
                ("g2", "g3"),
                ("g5", "g7"),
                ("g2*g7", "g4*g1^-1*g4^-1*g5"),
                ("g6*g2^-1*g4^-1", "g5*g3^-1*g2^-1*g4^-1"),
                ("g6^-1*g1^-1*g4", "g3*g5^-1*g4*g1"),
            ],
            extra: &[],
            shared_triple: false,
        },
        71 => Raw {
            names: &["g1", "g2", "g3", "g4", "g5", "g6", "g7", "g8", "g9"],
            matrices: &[
                [[-5, 0], [5, -3], [-1, 1], [-10, -1]],
                [[-3, 2], [-17, -1], [-4, 0], [1, -2]],
                [[5, 0], [0, -2], [1, -1], [-7, 0]],
                [[-5, 0], [2, 1], [-2, -1], [-3, 1]],
                [[-6, -3], [13, -2], [5, -1], [4, 1]],
                [[-1, 2], [12, 0], [-6, 0], [-1, 2]],
                [[1, 0], [-1, 0], [0, 0], [1, 0]],
                [[0, 0], [-1, 0], [1, 0], [-1, 0]],
                [[1, 1], [-7, 0], [3, 0], [-2, 1]],
            ],
            relators: &[
                "g8^3",
                "(g8^-1,g4)",
                "(g8*g7^-1)^2",
                "g1^-1*g3*g7*g3^-1*g1*g7^-1",
                "g6*g3*g6^-1*g7*g9^-1*g3^-1*g9*g7^-1",
                "g7^-1*g6*g3*g6^-1*g5^-1*g2*g7*g5*g6*g3^-1*g6^-1*g2^-1",
                "g8*g7^-1*g1*g5*g6*g3^-1*g1*g5*g7*g8^-1*g5^-1*g1^-1*g3*g6^-1*g5^-1*g1^-1",
                "g4^-1*g7^-1*g5^-1*g2*g1^-1*g3*g7*g9*g4*g1*g7^-1*g2^-1*g5*g7*g9^-1*g3^-1",
                "g5*g8*g7^-1*g5^-1*g1^-1*g7*g9*g6*g1*g5*g8*g7^-1*g5^-1*g1^-1*g3*g6^-1*g9^-1*g7^-1*g3^-1*g1",
                "g2*g6*g1*g5*g7*g8^-1*g5^-1*g1^-1*g3*g6^-1*g7*g8^-1*g5^-1*g2^-1*g5*g7*g8^-1*g5^-1*g1^-1*g7*g8^-1*g1*g5*g6*g3^-1*g6^-1",
            ],
            peripherals: &[
                ("g7", "g1^-1*g3"),
                ("g2", "g6*g1*g5*g7*g8^-1*g5^-1*g1^-1*g3*g6^-1*g7*g8^-1*g5^-1"),
                ("g3", "g6^-1*g7*g9^-1"),
                ("g7*g2", "g6*g3*g6^-1*g5^-1*g7^-1"),
                ("g7*g9*g6", "g3^-1*g1*g5*g8*g7^-1*g5^-1*g1^-1"),
                ("g3*g9*g4", "g4^-1*g7^-1*g5^-1*g2*g7*g1^-1"),
                (
                    "g4*g1*g7^-1*g2^-1*g5*g7*g9^-1*g3^-1*g8^-1*g4^-1",
                    "g6*g3^-1*g1*g5*g8*g7^-1*g5^-1*g1^-1*g6^-1*g9^-1*g8^-1*g4^-1",
                ),
            ],
            extra: &[],
            shared_triple: false,
        },
        _ => return None,
    };
    Some(r)
}

/// Bundled data for `d`.
pub fn bianchi_data(d: i64) -> Result<BianchiData, FpError> {
    let r = raw(d).ok_or(FpError::UnsupportedD(d))?;
    let presentation = Presentation::parse(r.names, r.relators)?;
    let matrices = r.matrices.iter().map(|m| ProjMatrix::from_ints(d, *m)).collect();
    let names = &presentation.names;
    let peripherals = r
        .peripherals
        .iter()
        .map(|(a, b)| Ok((super::parse_word(names, a)?, super::parse_word(names, b)?)))
        .collect::<Result<Vec<_>, FpError>>()?;
    let stabilizer_extra = r
        .extra
        .iter()
        .map(|w| super::parse_word(names, w))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BianchiData {
        d,
        presentation,
        matrices,
        peripherals,
        stabilizer_extra,
        shared_triple: r.shared_triple,
        omega_squared: d == 3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::class_number;

    /// Exact evaluation in i128 with overflow checks.
    fn eval128(data: &BianchiData, w: &Word) -> [[i128; 2]; 4] {
        let (t, n) = crate::ring::omega_trace_norm(data.d);
        let (t, n) = (t as i128, n as i128);
        let mulq = |x: [i128; 2], y: [i128; 2]| -> [i128; 2] {
            // (a + bω)(c + eω) with ω² = tω − n
            let ac = x[0].checked_mul(y[0]).unwrap();
            let be = x[1].checked_mul(y[1]).unwrap();
            let cross = x[0].checked_mul(y[1]).unwrap() + x[1].checked_mul(y[0]).unwrap();
            [ac - n * be, cross + t * be]
        };
        let add = |x: [i128; 2], y: [i128; 2]| [x[0] + y[0], x[1] + y[1]];
        let mm = |p: [[i128; 2]; 4], q: [[i128; 2]; 4]| {
            [
                add(mulq(p[0], q[0]), mulq(p[1], q[2])),
                add(mulq(p[0], q[1]), mulq(p[1], q[3])),
                add(mulq(p[2], q[0]), mulq(p[3], q[2])),
                add(mulq(p[2], q[1]), mulq(p[3], q[3])),
            ]
        };
        let conv = |m: &ProjMatrix| {
            let v = m.to_ints();
            v.map(|x| [x[0] as i128, x[1] as i128])
        };
        let mats: Vec<_> = data.matrices.iter().map(conv).collect();
        let invs: Vec<_> = data.matrices.iter().map(|m| conv(&m.inverse())).collect();
        let id = [[1, 0], [0, 0], [0, 0], [1, 0]];
        w.evaluate(&mats, &invs, id, |a, b| mm(*a, *b))
    }

    fn is_pm_id(m: [[i128; 2]; 4]) -> bool {
        let id = [[1, 0], [0, 0], [0, 0], [1, 0]];
        let neg = [[-1, 0], [0, 0], [0, 0], [-1, 0]];
        m == id || m == neg
    }

    #[test]
    fn generators_have_determinant_one() {
        for d in SUPPORTED_D {
            let data = bianchi_data(d).unwrap();
            for (m, name) in data.matrices.iter().zip(data.names()) {
                assert_eq!(m.det(), crate::ring::QuadInt::one(d), "d={} {}", d, name);
            }
        }
    }

    #[test]
    fn relators_hold_in_matrices() {
        for d in SUPPORTED_D {
            let data = bianchi_data(d).unwrap();
            for r in &data.presentation.relators {
                assert!(is_pm_id(eval128(&data, r)), "d={} relator {}", d, r.format(data.names()));
            }
        }
    }

    #[test]
    fn peripherals_commute_and_are_parabolic() {
        for d in SUPPORTED_D {
            let data = bianchi_data(d).unwrap();
            assert_eq!(data.cusp_classes(), class_number(d), "d={}", d);
            for (p1, p2) in &data.peripherals {
                let c = Word::commutator(p1, p2);
                assert!(is_pm_id(eval128(&data, &c)), "d={}", d);
                for p in [p1, p2] {
                    let m = eval128(&data, p);
                    let tr = [m[0][0] + m[3][0], m[0][1] + m[3][1]];
                    assert!(tr == [2, 0] || tr == [-2, 0], "d={} trace {:?}", d, tr);
                    assert!(!is_pm_id(m));
                }
                // independent translations: p1^a p2^b = ±Id only for a = b = 0
                for a in -3i64..=3 {
                    for b in -3i64..=3 {
                        if (a, b) != (0, 0) {
                            let w = p1.pow(a).mul(&p2.pow(b));
                            assert!(!is_pm_id(eval128(&data, &w)), "d={} {} {}", d, a, b);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unsupported() {
        assert!(matches!(bianchi_data(13), Err(FpError::UnsupportedD(13))));
        let d2 = bianchi_data(2).unwrap();
        assert_eq!(d2.names(), &["a", "t", "u"]);
        assert_eq!(d2.presentation.relators.len(), 4);
        let d23 = bianchi_data(23).unwrap();
        assert_eq!(d23.ngens(), 5);
        assert_eq!(d23.cusp_classes(), 3);
    }
}
