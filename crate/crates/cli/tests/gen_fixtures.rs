//! Regenerates the bundled synthetic fixtures. Ignored by default; run
//! explicitly after changing the fixture recipe:
//!
//! ```text
//! cargo test -p entrovel --test gen_fixtures -- --ignored
//! ```

use std::fs;
use std::path::PathBuf;

use entrovel_core::datasource::checksum;
use entrovel_core::series::AnnualSeries;

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn exponential(name: &str, first_year: i32, n: usize, g0: f64, lambda: f64) -> AnnualSeries {
    let pairs: Vec<(i32, f64)> = (0..n)
        .map(|t| (first_year + t as i32, g0 * (lambda * t as f64).exp()))
        .collect();
    AnnualSeries::from_year_values(name, &pairs).unwrap()
}

#[test]
#[ignore = "writes into tests/fixtures; run on demand"]
fn regenerate_fixtures() {
    let dir = fixtures_dir();
    fs::create_dir_all(&dir).unwrap();

    let write = |name: &str, series: &AnnualSeries| {
        fs::write(dir.join(name), series.to_csv()).unwrap();
    };

    // 2001-2019 panel with reference rate constants injected.
    write("money.csv", &exponential("money", 2001, 19, 7.5805, 0.0555));
    write("gdp.csv", &exponential("gdp", 2001, 19, 10.582, 0.0197));
    write("home.csv", &exponential("home", 2001, 19, 100.0, 0.0320));
    write("russell.csv", &exponential("russell", 2001, 19, 483.0, 0.0624));
    write("sp500.csv", &exponential("sp500", 2001, 19, 1148.08, 0.0358));
    write("nasdaq.csv", &exponential("nasdaq", 2001, 19, 1950.4, 0.0878));
    write("cpi.csv", &exponential("cpi", 2001, 19, 177.1, 0.0203));

    // Long span: 1928-2019 inclusive is 92 points.
    write("sp1928.csv", &exponential("sp1928", 1928, 92, 17.66, 0.0652));

    // Combined-slope fixture: money-plus-gdp growth in one series.
    write("mg.csv", &exponential("mg", 2001, 19, 500.0, 0.0752));

    // Degenerate and shaped fixtures.
    let flat_pairs: Vec<(i32, f64)> = (2000..=2010).map(|y| (y, 5.0)).collect();
    write("flat.csv", &AnnualSeries::from_year_values("flat", &flat_pairs).unwrap());
    write("growth05.csv", &exponential("growth05", 2000, 19, 3.0, 0.05));

    // Smooth growth with a two-year slump around t = 7.
    let crisis_pairs: Vec<(i32, f64)> = (0..19)
        .map(|t| {
            let base = 3.0 * (0.05 * t as f64).exp();
            let dip = match t {
                7 => 0.75,
                8 => 0.80,
                _ => 1.0,
            };
            (2001 + t, base * dip)
        })
        .collect();
    write("crisis.csv", &AnnualSeries::from_year_values("crisis", &crisis_pairs).unwrap());

    // Source-format file plus a local manifest exercising column mapping
    // and checksum verification end to end.
    let money = exponential("money", 2001, 19, 7.5805, 0.0555);
    let mut raw = String::from("Year,Unit,Broad Money\n");
    for obs in money.observations() {
        raw.push_str(&format!(
            "{},T$,{}\n",
            money.calendar_year(obs.t),
            obs.value
        ));
    }
    fs::write(dir.join("raw_money.csv"), &raw).unwrap();
    let manifest = format!(
        "# local fixture manifest\n[money]\npath = raw_money.csv\nyear_column = Year\nvalue_column = Broad Money\nsha256 = {}\n",
        checksum(money.to_csv().as_bytes())
    );
    fs::write(dir.join("local.manifest"), manifest).unwrap();
}
