//! Plain-text configuration files and CSV/text result files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::{Preset, SimConfig};
use crate::error::{Error, Result};
use crate::harness::ExperimentReport;

/// Applies `key = value` lines to `base`. Blank lines and `#` comments are
/// skipped. Returns the line on which each key was last set.
pub fn apply_config_text(base: &mut SimConfig, text: &str) -> Result<Vec<(String, usize)>> {
    let mut origin: Vec<(String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        base.set(key, value).map_err(|message| Error::Parse {
            line: line_no,
            message: format!("`{key}`: {message}"),
        })?;
        origin.retain(|(k, _)| k != key);
        origin.push((key.to_string(), line_no));
    }
    Ok(origin)
}

/// Parses a whole configuration text on top of the desk preset and validates it.
pub fn parse_config_str(text: &str) -> Result<SimConfig> {
    parse_layers(Preset::Desk, Some(text), &[])
}

/// Preset, then file contents, then flag overrides, then validation.
///
/// A validation failure on a key that came from the file is reported with
/// its line number.
pub fn parse_layers(
    preset: Preset,
    file_text: Option<&str>,
    overrides: &[(&str, String)],
) -> Result<SimConfig> {
    let mut cfg = SimConfig::preset(preset);
    let origin = match file_text {
        Some(text) => apply_config_text(&mut cfg, text)?,
        None => Vec::new(),
    };
    for (key, value) in overrides {
        cfg.set(key, value).map_err(|message| Error::Parse {
            line: 0,
            message: format!("flag for `{key}`: {message}"),
        })?;
    }
    if let Err(e) = cfg.validate() {
        if let Error::InvalidConfig { key, reason } = &e {
            let from_flag = overrides.iter().any(|(k, _)| k == key);
            if let Some((_, line)) = origin.iter().find(|(k, _)| k == key).filter(|_| !from_flag) {
                return Err(Error::Parse {
                    line: *line,
                    message: format!("`{key}` {reason}"),
                });
            }
        }
        return Err(e);
    }
    Ok(cfg)
}

pub fn parse_config(
    path: Option<&Path>,
    preset: Preset,
    overrides: &[(&str, String)],
) -> Result<SimConfig> {
    let text = path.map(fs::read_to_string).transpose()?;
    parse_layers(preset, text.as_deref(), overrides)
}

pub fn config_text(config: &SimConfig) -> String {
    let mut s = String::new();
    for line in config.to_kv_lines() {
        s.push_str(&line);
        s.push('\n');
    }
    s
}

pub fn per_ue_csv(report: &ExperimentReport) -> String {
    let mut s = String::from("scheme,instance,ue,pilot,controller_ap,n_serving_aps,se_ul,se_dl\n");
    for r in &report.reports {
        for u in &r.records {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                u.scheme,
                u.instance,
                u.ue,
                u.pilot,
                u.controller_ap,
                u.n_serving_aps,
                u.se_ul,
                u.se_dl
            );
        }
    }
    s
}

pub fn summary_text(report: &ExperimentReport) -> String {
    let mut s = String::new();
    for r in &report.reports {
        let name = r.scheme.name();
        let rows: [(&str, String); 9] = [
            ("avg_ul", r.avg_ul().to_string()),
            ("avg_dl", r.avg_dl().to_string()),
            ("p10_ul", r.p10_ul().to_string()),
            ("p10_dl", r.p10_dl().to_string()),
            ("alg1_iters_mean", r.alg1_iters_mean().to_string()),
            ("alg2_iters_mean", r.alg2_iters_mean().to_string()),
            ("messages_total", r.overhead.messages_total().to_string()),
            ("fallback_count", r.overhead.fallback_count.to_string()),
            ("dl_clamped", r.dl_clamped.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(s, "{name}.{k} = {v}");
        }
    }
    let _ = writeln!(s, "digest = {}", report.digest());
    s
}

/// Empirical CDF: the `i`-th sorted sample has cumulative probability `i / n`.
pub fn cdf_csv(sorted: &[f64]) -> String {
    let n = sorted.len();
    let mut s = String::from("se,cum_prob\n");
    for (i, x) in sorted.iter().enumerate() {
        let _ = writeln!(s, "{},{}", x, (i + 1) as f64 / n as f64);
    }
    s
}

/// Writes `per_ue.csv`, `summary.txt`, `config.txt` and one CDF file per
/// scheme and link direction into `out_dir`, creating it if needed.
pub fn write_results(report: &ExperimentReport, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("per_ue.csv"), per_ue_csv(report))?;
    fs::write(out_dir.join("summary.txt"), summary_text(report))?;
    fs::write(out_dir.join("config.txt"), config_text(&report.config))?;
    for r in &report.reports {
        fs::write(
            out_dir.join(format!("cdf_{}_ul.csv", r.scheme)),
            cdf_csv(&r.ul.cdf_points),
        )?;
        fs::write(
            out_dir.join(format!("cdf_{}_dl.csv", r.scheme)),
            cdf_csv(&r.dl.cdf_points),
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let cfg = parse_layers(
            Preset::Desk,
            Some("n_pilots = 10\n"),
            &[("n_ues", "100".into())],
        )
        .unwrap();
        assert_eq!((cfg.n_pilots, cfg.n_ues), (10, 100));
        let cfg = parse_layers(Preset::Desk, Some("n_ues = 8"), &[("n_ues", "9".into())]).unwrap();
        assert_eq!(cfg.n_ues, 9);
    }

    #[test]
    fn empty_file_is_desk_preset() {
        assert_eq!(parse_config_str("").unwrap(), SimConfig::default());
        assert_eq!(
            parse_config_str("# nothing\n\n   \n").unwrap(),
            SimConfig::default()
        );
    }

    #[test]
    fn errors_name_key_and_line() {
        match parse_config_str("n_aps = 4\nn_pilots = 0\n") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("n_pilots"), "{message}");
            }
            other => panic!("{other:?}"),
        }
        match parse_config_str("\nbogus = 1") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("bogus"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_config_str("n_aps 4"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config_str("seed = -1"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn flag_violation_names_key() {
        let r = parse_layers(Preset::Desk, None, &[("n_pilots", "0".into())]);
        assert!(matches!(
            r,
            Err(Error::InvalidConfig {
                key: "n_pilots",
                ..
            })
        ));
    }

    #[test]
    fn inline_comments() {
        let cfg = parse_config_str("n_aps = 7   # fewer\n").unwrap();
        assert_eq!(cfg.n_aps, 7);
    }

    #[test]
    fn config_dump_round_trips() {
        let mut cfg = SimConfig::preset(Preset::Paper);
        cfg.asd_deg = 7.25;
        cfg.alg2_max_iter = Some(13);
        cfg.seed = u64::MAX;
        assert_eq!(
            parse_layers(Preset::Desk, Some(&config_text(&cfg)), &[]).unwrap(),
            cfg
        );
    }

    #[test]
    fn cdf_ends_at_one() {
        let s = cdf_csv(&[0.5, 1.0, 2.0]);
        assert_eq!(s.lines().last(), Some("2,1"));
    }
}
