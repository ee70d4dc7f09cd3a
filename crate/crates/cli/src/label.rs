//! Readable, re-parseable names for ring elements and ideals.

use bianchi_core::ring::{QuadIdeal, QuadInt};

/// Symbol for √−d: `i` when d = 1, `s` otherwise.
pub fn sqrt_symbol(d: i64) -> &'static str {
    if d == 1 {
        "i"
    } else {
        "s"
    }
}

/// x written as (X + Y√−d)/den with den 1 or 2, e.g. `2+i`, `(1+s)/2`,
/// `1+3*s`.
pub fn quad_label(x: &QuadInt) -> String {
    let (x2, y2) = x.doubled_rect();
    let (xn, yn, den) = if x2 % 2 == 0 && y2 % 2 == 0 { (x2 / 2, y2 / 2, 1) } else { (x2, y2, 2) };
    let sym = sqrt_symbol(x.d);
    let ypart = |y: i64| match y {
        1 => sym.to_string(),
        _ => format!("{}*{}", y, sym),
    };
    let body = match (xn, yn) {
        (x, 0) => x.to_string(),
        (0, y) if y < 0 => format!("-{}", ypart(-y)),
        (0, y) => ypart(y),
        (x, y) if y < 0 => format!("{}-{}", x, ypart(-y)),
        (x, y) => format!("{}+{}", x, ypart(y)),
    };
    if den == 1 {
        body
    } else {
        format!("({})/2", body)
    }
}

fn units(d: i64) -> Vec<QuadInt> {
    let mut out = vec![QuadInt::one(d), QuadInt::int(d, -1)];
    match d {
        1 => {
            let i = QuadInt::omega(1);
            out.extend([i, -i]);
        }
        3 => {
            let w = QuadInt::omega(3);
            let w2 = w * w;
            out.extend([w, -w, w2, -w2]);
        }
        _ => {}
    }
    out
}

/// The associate with the largest real part, preferring a non-negative
/// imaginary part on ties.
pub fn normalize_associate(x: &QuadInt) -> QuadInt {
    units(x.d)
        .into_iter()
        .map(|u| u * *x)
        .max_by_key(|y| {
            let (a, b) = y.doubled_rect();
            (a, b >= 0)
        })
        .expect("units are non-empty")
}

/// `⟨g⟩` for principal ideals, `⟨n, k+lω⟩` from the Hermite basis otherwise.
pub fn ideal_label(i: &QuadIdeal) -> String {
    match i.generator() {
        Some(g) => format!("⟨{}⟩", quad_label(&normalize_associate(&g))),
        None => {
            let [a, b] = i.basis();
            format!("⟨{}, {}⟩", quad_label(&a), quad_label(&b))
        }
    }
}

/// Label of the conjugate ideal, written with the conjugate of the
/// generator chosen for `i` when principal.
pub fn conjugate_label(i: &QuadIdeal) -> String {
    match i.generator() {
        Some(g) => format!("⟨{}⟩", quad_label(&normalize_associate(&g).conj())),
        None => ideal_label(&conjugate(i)),
    }
}

/// Complex conjugate ideal.
pub fn conjugate(i: &QuadIdeal) -> QuadIdeal {
    let [a, b] = i.basis();
    QuadIdeal::from_generators(i.d, &[a.conj(), b.conj()]).expect("conjugate of a nonzero ideal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use bianchi_core::ring::parse_ideal_gens;

    fn ideal(d: i64, t: &str) -> QuadIdeal {
        QuadIdeal::from_generators(d, &parse_ideal_gens(d, t).unwrap()).unwrap()
    }

    #[test]
    fn labels() {
        assert_eq!(ideal_label(&ideal(1, "1+2*i")), "⟨2-i⟩");
        assert_eq!(ideal_label(&ideal(1, "1-i")), "⟨1+i⟩");
        assert_eq!(ideal_label(&ideal(7, "w")), "⟨(1+s)/2⟩");
        assert_eq!(ideal_label(&ideal(2, "1+s")), "⟨1+s⟩");
        assert_eq!(ideal_label(&ideal(15, "2, w")), "⟨2, (1+s)/2⟩");
        assert_eq!(ideal_label(&ideal(1, "3")), "⟨3⟩");
    }

    #[test]
    fn labels_reparse() {
        for (d, t) in [(1, "2+i"), (3, "(11+s)/2"), (2, "1+3*s"), (15, "2, w"), (23, "6, 3-w")] {
            let i = ideal(d, t);
            assert_eq!(ideal(d, &ideal_label(&i)), i, "{}", t);
        }
    }

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(&ideal(1, "2+i")), ideal(1, "2-i"));
        assert_eq!(conjugate(&ideal(1, "3")), ideal(1, "3"));
        assert_ne!(conjugate(&ideal(15, "2, w")), ideal(15, "2, w"));
        assert_eq!(conjugate_label(&ideal(1, "2+i")), "⟨2-i⟩");
    }
}
