//! Helpers shared by the integration tests.

#![allow(dead_code)]

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

pub const POWER_HEADER: &str = "Date;Time;Global_active_power;Global_reactive_power;Voltage;\
                                Global_intensity;Sub_metering_1;Sub_metering_2;Sub_metering_3";

/// Writes `rows` one-minute readings in the household power file layout,
/// with a daily load cycle and occasional runs of `?` rows. Returns how
/// many rows carry the missing marker.
pub fn write_power_fixture(path: &Path, rows: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = LogNormal::new(-1.2, 0.35).unwrap();
    let active = LogNormal::new(0.4, 0.55).unwrap();
    let mut out = BufWriter::new(File::create(path).unwrap());
    writeln!(out, "{POWER_HEADER}").unwrap();
    let mut missing = 0;
    let mut gap = 0usize;
    for t in 0..rows {
        let minute = (t + 17 * 60 + 24) % 1440;
        let day = 16 + (t + 17 * 60 + 24) / 1440;
        let (hour, min) = (minute / 60, minute % 60);
        let stamp = format!("{}/12/2006;{hour:02}:{min:02}:00", day % 28 + 1);
        if gap == 0 && rng.random::<f64>() < 0.0004 {
            gap = rng.random_range(5..60);
        }
        if gap > 0 {
            gap -= 1;
            missing += 1;
            writeln!(out, "{stamp};?;?;?;?;?;?;").unwrap();
            continue;
        }
        let busy = match hour {
            7..=9 | 18..=22 => 0.55,
            10..=17 => 0.25,
            _ => 0.08,
        };
        let mut kw: f64 = base.sample(&mut rng);
        if rng.random::<f64>() < busy {
            kw += active.sample(&mut rng);
        }
        let kw = kw.clamp(0.076, 11.122);
        let voltage = rng.random_range(228.0..252.0);
        writeln!(
            out,
            "{stamp};{kw:.3};{:.3};{voltage:.3};{:.3};0.000;{:.3};{:.3}",
            rng.random_range(0.0..0.5),
            kw * 1000.0 / voltage,
            rng.random_range(0.0..2.0_f64).floor(),
            rng.random_range(0.0..18.0_f64).floor(),
        )
        .unwrap();
    }
    missing
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
