//! Desk-scale SPARC codebooks: geometry, design matrix, scalar quantizer,
//! exhaustive minimum-distance search and the encode/decode pipeline.

mod codec;
pub mod io;
mod matrix;
mod params;
mod quantizer;
mod search;

pub use codec::{
    decode, distortion_slack, encode, encode_with_trace, payload_bits, section_coefficient, triangle_chain,
    triangle_constants, CodecSettings, EncodeOutcome, EncodeStatus, EncodeTrace, PayloadBits, TriangleChain,
};
pub use matrix::{
    generate_column, mean_square, mean_square_distance, synthesize_codeword, DesignMatrix, COLUMN_STREAM_ALGORITHM,
    DEFAULT_MEMORY_CAP,
};
pub use params::{derive_dimensions, BetaIndex, SparcParams};
pub use quantizer::{quantizer_level, scalar_quantize};
pub use search::{
    check_budget, check_codebook_budget, min_distance_search, min_distance_search_serial, SearchResult,
    DEFAULT_CODEWORD_BUDGET,
};

pub(crate) use search::Enumerator;
