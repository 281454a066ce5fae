//! Parsing of list and range arguments such as `1,2,5` or `-1..4`.

use crate::error::CliError;

/// Integers from a comma-separated list whose items are single values or
/// inclusive ranges `a..b`.
pub fn parse_int_list(spec: &str) -> Result<Vec<i64>, CliError> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(CliError::usage(format!("empty item in list '{spec}'")));
        }
        match split_range(item) {
            Some((a, b)) => {
                let (a, b) = (parse_int(a, spec)?, parse_int(b, spec)?);
                if a > b {
                    return Err(CliError::usage(format!("range {item} is empty")));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_int(item, spec)?),
        }
    }
    Ok(out)
}

/// Nonnegative integers, e.g. block lengths or particle counts.
pub fn parse_usize_list(spec: &str) -> Result<Vec<usize>, CliError> {
    parse_int_list(spec)?
        .into_iter()
        .map(|v| {
            usize::try_from(v).map_err(|_| CliError::usage(format!("{v} must be nonnegative")))
        })
        .collect()
}

/// Finite nonnegative reals from a comma-separated list.
pub fn parse_time_list(spec: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',')
        .map(str::trim)
        .map(|item| {
            let t: f64 = item
                .parse()
                .map_err(|_| CliError::usage(format!("'{item}' is not a number in '{spec}'")))?;
            if !(t.is_finite() && t >= 0.0) {
                return Err(CliError::usage(format!(
                    "time {item} must be finite and nonnegative"
                )));
            }
            Ok(t)
        })
        .collect()
}

fn split_range(item: &str) -> Option<(&str, &str)> {
    // skip a leading sign so "-3..-1" splits at the right place
    let at = item.get(1..)?.find("..")? + 1;
    Some((&item[..at], &item[at + 2..]))
}

fn parse_int(s: &str, spec: &str) -> Result<i64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::usage(format!("'{s}' is not an integer in '{spec}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_int_list("1,3,4").unwrap(), vec![1, 3, 4]);
        assert_eq!(parse_int_list("-1..2").unwrap(), vec![-1, 0, 1, 2]);
        assert_eq!(parse_int_list("-3..-2,5").unwrap(), vec![-3, -2, 5]);
        assert_eq!(parse_int_list("7").unwrap(), vec![7]);
        assert!(parse_int_list("3..1").is_err());
        assert!(parse_int_list("1,,2").is_err());
        assert!(parse_int_list("a").is_err());
        assert!(parse_usize_list("-1").is_err());
    }

    #[test]
    fn times() {
        assert_eq!(parse_time_list("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert!(parse_time_list("-1").is_err());
        assert!(parse_time_list("inf").is_err());
    }
}
