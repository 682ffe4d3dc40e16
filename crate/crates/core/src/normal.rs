//! Standard normal CDF and quantile at close to double precision.
//!
//! The quantile starts from Wichura's AS241 rational approximations and takes
//! one Halley step against the CDF, so the pair round-trips to a few ulps.

#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `Φ(x) = erfc(-x/√2) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `Φ⁻¹(p)`, with `±∞` at the endpoints and NaN outside `[0, 1]`.
pub fn normal_quantile(p: f64) -> f64 {
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let x = as241(p);
    // Halley step on Φ(x) - p, working in the tail that keeps precision.
    let err = if x < 0.0 {
        normal_cdf(x) - p
    } else {
        (1.0 - p) - normal_cdf(-x)
    };
    let density = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    if density == 0.0 || !err.is_finite() {
        return x;
    }
    let u = err / density;
    x - u / (1.0 + 0.5 * x * u)
}

fn poly(coef: &[f64], r: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * r + c)
}

const A: [f64; 8] = [
    3.387_132_872_796_366_608,
    1.331_416_678_917_843_774_5e2,
    1.971_590_950_306_551_442_7e3,
    1.373_169_376_550_946_112_5e4,
    4.592_195_393_154_987_145_7e4,
    6.726_577_092_700_870_085_3e4,
    3.343_057_558_358_812_810_5e4,
    2.509_080_928_730_122_672_7e3,
];
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091_125_2e1,
    6.871_870_074_920_579_083e2,
    5.394_196_021_424_751_107_7e3,
    2.121_379_430_158_659_586_7e4,
    3.930_789_580_009_271_061e4,
    2.872_908_573_572_194_267_4e4,
    5.226_495_278_852_854_561e3,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    2.417_807_251_774_506_117_7e-1,
    2.272_384_498_926_918_458_33e-2,
    7.745_450_142_783_414_076_4e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    6.897_673_349_851_000_045_5e-1,
    1.481_039_764_274_800_745_9e-1,
    1.519_866_656_361_645_719_66e-2,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    2.965_605_718_285_048_912_3e-1,
    2.653_218_952_657_612_309_3e-2,
    1.242_660_947_388_078_438_6e-3,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_376_9e-1,
    1.369_298_809_227_358_053_1e-1,
    1.487_536_129_085_061_485_25e-2,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

fn as241(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let tail = if q < 0.0 { p } else { 1.0 - p };
    let r = (-tail.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn cdf_reference_values() {
        assert!(rel(normal_cdf(-1.0), 0.158_655_253_931_457_051_4) < 1e-15);
        assert!(rel(normal_cdf(1.96), 0.975_002_104_851_779_565_9) < 1e-15);
        assert!(rel(normal_cdf(-5.0), 2.866_515_718_791_939_116_7e-7) < 1e-14);
        assert!(rel(normal_cdf(-8.5), 9.479_534_822_203_318_354_2e-18) < 1e-13);
        assert!(rel(normal_cdf(0.3), 0.617_911_422_188_952_637_3) < 1e-15);
        assert!(rel(normal_cdf(3.7), 0.999_892_200_266_522_611_7) < 1e-15);
    }

    #[test]
    fn quantile_reference_values() {
        let cases = [
            (0.975, 1.959_963_984_540_054_235_5),
            (0.1, -1.281_551_565_544_600_467),
            (1e-5, -4.264_890_793_922_824_628_5),
            (1e-10, -6.361_340_902_404_056_204_7),
            (0.42, -0.201_893_479_141_850_850_95),
            (0.8, 0.841_621_233_572_914_205_18),
        ];
        for (p, x) in cases {
            assert!(
                rel(normal_quantile(p), x) < 1e-14,
                "p {p}: {}",
                normal_quantile(p)
            );
        }
        assert_eq!(normal_quantile(0.5), 0.0);
        assert_eq!(normal_quantile(0.0), f64::NEG_INFINITY);
        assert_eq!(normal_quantile(1.0), f64::INFINITY);
        assert!(normal_quantile(1.5).is_nan());
        assert!(normal_quantile(1e-300).is_finite());
    }

    #[test]
    fn round_trip() {
        for i in 1..10_000 {
            let p = i as f64 / 10_000.0;
            assert!(rel(normal_cdf(normal_quantile(p)), p) < 1e-14, "p {p}");
        }
        // Relative conditioning of Φ at x is about x², one ulp of x costs that much.
        for k in 1..300 {
            let p = 10f64.powi(-k);
            let x = normal_quantile(p);
            assert!(rel(normal_cdf(x), p) < 1e-15 * (4.0 + x * x), "p {p}");
        }
    }
}
