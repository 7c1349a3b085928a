//! NMEA 0183 checksums and depth sentences (DBT, DPT).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NmeaError {
    #[error("invalid character {0:?} in sentence body")]
    InvalidChar(char),
    #[error("malformed sentence: {0}")]
    Malformed(&'static str),
    #[error("checksum mismatch: sentence says {expected}, computed {computed}")]
    ChecksumMismatch { expected: String, computed: String },
    #[error("unsupported sentence type {0:?}")]
    UnsupportedSentence(String),
    #[error("sentence carries no usable depth field")]
    MissingDepthField,
    #[error("depth {0} is not positive")]
    NonPositiveDepth(f64),
}

const FEET_TO_M: f64 = 0.3048;
const FATHOMS_TO_M: f64 = 1.8288;

/// XOR of every byte between `$` and `*`, as two uppercase hex digits.
pub fn nmea_checksum(body: &str) -> Result<String, NmeaError> {
    let mut cs = 0u8;
    for c in body.chars() {
        if !(' '..='~').contains(&c) || c == '$' || c == '*' {
            return Err(NmeaError::InvalidChar(c));
        }
        cs ^= c as u8;
    }
    Ok(format!("{cs:02X}"))
}

/// Wraps `body` into a complete `$body*CS` sentence.
pub fn format_sentence(body: &str) -> Result<String, NmeaError> {
    Ok(format!("${body}*{}", nmea_checksum(body)?))
}

/// Splits a sentence into its verified body. Trailing CR/LF are ignored.
pub fn verified_body(sentence: &str) -> Result<&str, NmeaError> {
    let s = sentence.trim_end_matches(['\r', '\n']);
    let s = s
        .strip_prefix('$')
        .ok_or(NmeaError::Malformed("sentence must start with '$'"))?;
    let (body, cs) = s
        .rsplit_once('*')
        .ok_or(NmeaError::Malformed("missing '*' checksum delimiter"))?;
    if cs.len() != 2 || !cs.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(NmeaError::Malformed("checksum must be two hex digits"));
    }
    let computed = nmea_checksum(body)?;
    if !computed.eq_ignore_ascii_case(cs) {
        return Err(NmeaError::ChecksumMismatch {
            expected: cs.to_string(),
            computed,
        });
    }
    Ok(body)
}

/// Extracts the depth in meters from a DBT or DPT sentence.
///
/// DBT prefers the meters field and falls back to feet, then fathoms. The DPT
/// transducer offset is ignored.
pub fn parse_nmea_depth(sentence: &str) -> Result<f64, NmeaError> {
    let body = verified_body(sentence)?;
    let mut fields = body.split(',');
    let address = fields.next().unwrap_or_default();
    if address.len() != 5 {
        return Err(NmeaError::Malformed("address field must be talker + type"));
    }
    let kind = &address[2..];
    let fields: Vec<&str> = fields.collect();
    let depth = match kind {
        "DBT" => {
            let units = [(2usize, 1.0), (0, FEET_TO_M), (4, FATHOMS_TO_M)];
            units
                .iter()
                .find_map(|&(i, scale)| number(fields.get(i)).map(|v| v * scale))
        }
        "DPT" => number(fields.first()),
        other => return Err(NmeaError::UnsupportedSentence(other.to_string())),
    };
    let depth = depth.ok_or(NmeaError::MissingDepthField)?;
    if depth <= 0.0 {
        return Err(NmeaError::NonPositiveDepth(depth));
    }
    Ok(depth)
}

fn number(field: Option<&&str>) -> Option<f64> {
    field
        .filter(|f| !f.is_empty())
        .and_then(|f| f.parse::<f64>().ok())
        .filter(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    // independent XOR oracle over raw bytes
    fn xor_oracle(body: &str) -> u8 {
        body.bytes().fold(0, |acc, b| acc ^ b)
    }

    #[test]
    fn checksum_trivial_cases() {
        assert_eq!(nmea_checksum("").unwrap(), "00");
        assert_eq!(nmea_checksum("A").unwrap(), "41");
    }

    #[test]
    fn checksum_matches_oracle() {
        let body = "SDDBT,23.6,f,7.2,M,3.9,F";
        assert_eq!(xor_oracle(body), 0x3E);
        assert_eq!(nmea_checksum(body).unwrap(), "3E");
        assert_eq!(format!("{:02X}", xor_oracle("SDDPT,7.2,0.0")), "52");
    }

    #[test]
    fn checksum_rejects_delimiters() {
        assert_eq!(nmea_checksum("AB*C"), Err(NmeaError::InvalidChar('*')));
        assert_eq!(nmea_checksum("$AB"), Err(NmeaError::InvalidChar('$')));
        assert!(nmea_checksum("A\tB").is_err());
    }

    #[test]
    fn dpt_depth() {
        assert_eq!(parse_nmea_depth("$SDDPT,7.2,0.0*52").unwrap(), 7.2);
    }

    #[test]
    fn dbt_depth_prefers_meters() {
        assert_eq!(
            parse_nmea_depth("$SDDBT,23.6,f,7.2,M,3.9,F*3E\r\n").unwrap(),
            7.2
        );
    }

    #[test]
    fn dbt_falls_back_to_feet() {
        let s = format_sentence("SDDBT,10.0,f,,M,,F").unwrap();
        assert!((parse_nmea_depth(&s).unwrap() - 3.048).abs() < 1e-12);
    }

    #[test]
    fn corrupted_checksum_rejected() {
        assert!(matches!(
            parse_nmea_depth("$SDDPT,7.2,0.0*53"),
            Err(NmeaError::ChecksumMismatch { .. })
        ));
        assert!(matches!(
            parse_nmea_depth("$SDDPT,7.3,0.0*52"),
            Err(NmeaError::ChecksumMismatch { .. })
        ));
    }

    #[test]
    fn error_paths() {
        let gga = format_sentence("GPGGA,1,2").unwrap();
        assert_eq!(
            parse_nmea_depth(&gga),
            Err(NmeaError::UnsupportedSentence("GGA".into()))
        );
        let empty = format_sentence("SDDPT,,0.0").unwrap();
        assert_eq!(parse_nmea_depth(&empty), Err(NmeaError::MissingDepthField));
        let zero = format_sentence("SDDPT,0.0,0.0").unwrap();
        assert_eq!(
            parse_nmea_depth(&zero),
            Err(NmeaError::NonPositiveDepth(0.0))
        );
        assert!(matches!(
            parse_nmea_depth("SDDPT,7.2"),
            Err(NmeaError::Malformed(_))
        ));
        assert!(matches!(
            parse_nmea_depth("$SDDPT,7.2"),
            Err(NmeaError::Malformed(_))
        ));
    }

    #[test]
    fn reserialized_sentence_is_identical() {
        let s = "$SDDBT,23.6,f,7.2,M,3.9,F*3E";
        let body = verified_body(s).unwrap();
        assert_eq!(format_sentence(body).unwrap(), s);
    }
}
