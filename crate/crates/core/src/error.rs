use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// A ghost, Breaker or Maker action broke the box game protocol.
    #[error("protocol violation in round {round}: {message}")]
    Protocol { round: u64, message: String },

    /// A Breaker strategy returned an edge it was not allowed to claim.
    #[error("strategy fault ({strategy}): {message}")]
    StrategyFault { strategy: String, message: String },

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("instance too large: {what} = {got} exceeds limit {limit}")]
    Size {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn protocol(round: u64, message: impl Into<String>) -> Self {
        Error::Protocol {
            round,
            message: message.into(),
        }
    }

    /// Builds a parse error from a `serde_json` error, translating its
    /// line/column position into a byte offset within `input`.
    pub fn from_json(input: &str, err: &serde_json::Error) -> Self {
        let offset = byte_offset(input, err.line(), err.column());
        Error::Parse {
            offset,
            message: err.to_string(),
        }
    }
}

fn byte_offset(input: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, l) in input.split_inclusive('\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(input.len());
        }
        offset += l.len();
    }
    input.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_offsets_point_into_input() {
        let input = "{\n  \"a\": 1,\n  \"b\": ]\n}";
        let err = serde_json::from_str::<serde_json::Value>(input).unwrap_err();
        match Error::from_json(input, &err) {
            Error::Parse { offset, .. } => assert_eq!(&input[offset..offset + 1], "]"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
