//! Turning generated token streams into tags, and merging them with
//! closed-vocabulary predictions.

mod assemble;
mod stream;

pub use assemble::{
    assemble_tags, decode_post, merge_predictions, select_topk_refined, MergeOptions, RefinedTag,
    COMBINED_SCORE_RULE,
};
pub use stream::{
    load_meta_predictions, load_token_streams, read_meta_predictions, read_token_streams,
    write_meta_predictions, write_token_streams, MetaPrediction, ScoredTag, Token, TokenKind,
    TokenStream, SEPARATOR_TEXT,
};
