use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::dynamics::{RunKind, Trajectory};
use crate::error::Result;
use crate::schumpeter::SweepResult;

pub const TRAJECTORY_HEADER: &str = "t,x_I,x_R,payoff_I,payoff_R";
pub const SWEEP_HEADER: &str = "alpha,beta,xi,in_domain,x_I,dGamma_dalpha,dGamma_dbeta";

/// Formats `v` with 17 significant digits, trailing zeros removed, in the
/// style of C's `%.17g`. The text parses back to exactly `v`.
pub fn format_float(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let mut out = String::with_capacity(24);
    if negative {
        out.push('-');
    }
    if (-5..17).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
            out.push_str(digits);
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(digits);
                out.extend(std::iter::repeat_n('0', int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        let _ = write!(out, "e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    out
}

/// Trajectory CSV text: `#` metadata lines, the header, then one row per sample.
/// `extra` adds `key=value` metadata after the built-in lines.
pub fn trajectory_csv_string(traj: &Trajectory, extra: &[(&str, String)]) -> String {
    let meta = &traj.meta;
    let [a, b, c, d] = meta.matrix.entries().map(format_float);
    let mut out = String::with_capacity(64 * (traj.len() + 8));
    let _ = writeln!(out, "# protocol={}", meta.protocol);
    let _ = writeln!(out, "# matrix={a},{b},{c},{d}");
    let _ = writeln!(out, "# x0={}", format_float(meta.x0.x1()));
    match meta.run {
        RunKind::Ode { dt } => {
            let _ = writeln!(out, "# dt={}", format_float(dt));
        }
        RunKind::Stochastic {
            n,
            clock_rate,
            seed,
        } => {
            let _ = writeln!(out, "# N={n}");
            let _ = writeln!(out, "# clock_rate={}", format_float(clock_rate));
            let _ = writeln!(out, "# seed={seed}");
        }
    }
    for (k, v) in extra {
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for ((t, x), (pi_i, pi_r)) in traj.times().iter().zip(traj.states()).zip(traj.payoffs()) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format_float(*t),
            format_float(x.x1()),
            format_float(x.x2()),
            format_float(*pi_i),
            format_float(*pi_r)
        );
    }
    out
}

pub fn write_trajectory_csv(
    traj: &Trajectory,
    path: impl AsRef<Path>,
    extra: &[(&str, String)],
) -> Result<()> {
    fs::write(path, trajectory_csv_string(traj, extra))?;
    Ok(())
}

pub fn sweep_csv_string(res: &SweepResult) -> String {
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    let mut out = String::with_capacity(96 * (res.rows.len() + 1));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in &res.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            format_float(row.alpha),
            format_float(row.beta),
            format_float(row.xi),
            row.in_domain,
            opt(row.innovators),
            opt(row.d_alpha),
            opt(row.d_beta)
        );
    }
    out
}

pub fn write_sweep_csv(res: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, sweep_csv_string(res))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, Protocol};
    use crate::game::GameMatrix;
    use crate::schumpeter::sweep;

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(2.0 / 3.0), "0.66666666666666663");
        assert_eq!(format_float(100.0), "100");
        assert_eq!(format_float(-1.25), "-1.25");
        assert_eq!(format_float(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_float(1e20), "1e+20");
        assert_eq!(format_float(0.0001), "0.0001");
        for v in [0.1, 1.0 / 3.0, 6.0 / 7.0, 1e-300, 123456.789, -2.5e-12] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn trajectory_csv_layout() {
        let m = GameMatrix::new(0.0, 2.0, 1.0, 0.0).unwrap();
        let p = m.interior_equilibrium().unwrap();
        let traj = integrate(Protocol::Ppi, &m, p, 1.0, 0.25).unwrap();
        let text = trajectory_csv_string(&traj, &[("input_sha256", "abc".into())]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# protocol=ppi");
        assert_eq!(lines[1], "# matrix=0,2,1,0");
        assert_eq!(lines[3], "# dt=0.25");
        assert_eq!(lines[4], "# input_sha256=abc");
        assert_eq!(lines[5], TRAJECTORY_HEADER);
        let rows = &lines[6..];
        assert_eq!(rows.len(), 5);
        let x_cells: Vec<&str> = rows.iter().map(|r| r.split(',').nth(1).unwrap()).collect();
        assert!(x_cells.iter().all(|c| *c == x_cells[0]));
    }

    #[test]
    fn sweep_csv_layout() {
        let res = sweep(&[3.0], &[1.2, 5.0], 0.0).unwrap();
        let text = sweep_csv_string(&res);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first[3], "true");
        assert!((first[4].parse::<f64>().unwrap() - 0.857143).abs() < 1e-6);
        assert_eq!(lines[2], "3,5,0,false,,,");
    }
}
