//! CIEDE2000 color difference (Sharma, Wu and Dalal formulation).

use crate::color::{lab_from_srgb, Lab, Srgb};
use crate::math;

const POW25_7: f64 = 6_103_515_625.0;

/// Delta E 2000 between two Lab colors with `kL = kC = kH = 1`.
pub fn delta_e00(lab1: Lab, lab2: Lab) -> f64 {
    let c1 = math::hypot(lab1.a, lab1.b);
    let c2 = math::hypot(lab2.a, lab2.b);
    let c_bar = 0.5 * (c1 + c2);
    let c7 = math::powf(c_bar, 7.0);
    let g = 0.5 * (1.0 - math::sqrt(c7 / (c7 + POW25_7)));
    let a1 = (1.0 + g) * lab1.a;
    let a2 = (1.0 + g) * lab2.a;
    let c1p = math::hypot(a1, lab1.b);
    let c2p = math::hypot(a2, lab2.b);
    let hue = |b: f64, a: f64| -> f64 {
        if b == 0.0 && a == 0.0 {
            0.0
        } else {
            let h = math::to_degrees(math::atan2(b, a));
            if h < 0.0 {
                h + 360.0
            } else {
                h
            }
        }
    };
    let h1p = hue(lab1.b, a1);
    let h2p = hue(lab2.b, a2);

    let dl = lab2.l - lab1.l;
    let dc = c2p - c1p;
    let product = c1p * c2p;
    let dh = if product == 0.0 {
        0.0
    } else {
        let d = h2p - h1p;
        if d > 180.0 {
            d - 360.0
        } else if d < -180.0 {
            d + 360.0
        } else {
            d
        }
    };
    let dh_big = 2.0 * math::sqrt(product) * math::sin(math::to_radians(dh) / 2.0);

    let l_bar = 0.5 * (lab1.l + lab2.l);
    let cp_bar = 0.5 * (c1p + c2p);
    let h_bar = if product == 0.0 {
        h1p + h2p
    } else if math::abs(h1p - h2p) <= 180.0 {
        0.5 * (h1p + h2p)
    } else if h1p + h2p < 360.0 {
        0.5 * (h1p + h2p + 360.0)
    } else {
        0.5 * (h1p + h2p - 360.0)
    };
    let t = 1.0 - 0.17 * math::cos(math::to_radians(h_bar - 30.0))
        + 0.24 * math::cos(math::to_radians(2.0 * h_bar))
        + 0.32 * math::cos(math::to_radians(3.0 * h_bar + 6.0))
        - 0.20 * math::cos(math::to_radians(4.0 * h_bar - 63.0));
    let d_theta = 30.0 * math::exp(-((h_bar - 275.0) / 25.0) * ((h_bar - 275.0) / 25.0));
    let cp7 = math::powf(cp_bar, 7.0);
    let rc = 2.0 * math::sqrt(cp7 / (cp7 + POW25_7));
    let l50 = (l_bar - 50.0) * (l_bar - 50.0);
    let sl = 1.0 + 0.015 * l50 / math::sqrt(20.0 + l50);
    let sc = 1.0 + 0.045 * cp_bar;
    let sh = 1.0 + 0.015 * cp_bar * t;
    let rt = -math::sin(math::to_radians(2.0 * d_theta)) * rc;

    let tl = dl / sl;
    let tc = dc / sc;
    let th = dh_big / sh;
    math::sqrt(tl * tl + tc * tc + th * th + rt * tc * th)
}

/// Delta E 2000 between two 8-bit sRGB colors.
pub fn ciede2000(c1: Srgb, c2: Srgb) -> f64 {
    if c1 == c2 {
        return 0.0;
    }
    delta_e00(lab_from_srgb(c1), lab_from_srgb(c2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_is_zero() {
        assert_eq!(ciede2000([12, 200, 77], [12, 200, 77]), 0.0);
        assert_eq!(delta_e00(Lab::new(50.0, 2.5, 0.0), Lab::new(50.0, 2.5, 0.0)), 0.0);
    }

    #[test]
    fn black_white_is_one_hundred() {
        assert!((ciede2000([0, 0, 0], [255, 255, 255]) - 100.0).abs() < 1e-3);
    }

    #[test]
    fn first_reference_pair() {
        let d = delta_e00(Lab::new(50.0, 2.6772, -79.7751), Lab::new(50.0, 0.0, -82.7485));
        assert!((d - 2.0425).abs() < 1e-4, "{d}");
    }
}
