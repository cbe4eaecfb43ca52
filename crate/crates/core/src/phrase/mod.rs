//! Training-phrase grammars and their seeded expansion.

mod build;
mod expand;
mod grammar;

use thiserror::Error;

pub use build::{
    article, build_decision_grammar, build_input_grammar, default_surface_rules, of_surfaces,
    spoken_label, with_surfaces, InputVocabulary, ParamStyle, SurfaceRule, INIT_PHRASES,
    MAX_TEMPLATES,
};
pub use expand::{expand, expand_intent, AnnotatedPhrase, Span};
pub use grammar::{sentence, slot_parameter, GenerationGrammar, IntentRule, Notation, Sentence, SlotValue, Token};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhraseError {
    #[error("intent `{intent}` needs a budget of at least {mandatory}, got {budget}")]
    BudgetTooSmall {
        intent: String,
        budget: usize,
        mandatory: usize,
    },
    #[error("no intent rule `{0}`")]
    UnknownIntent(String),
    #[error("alias `{0}` is not defined")]
    UndefinedAlias(String),
    #[error("slot `{0}` is not defined")]
    UndefinedSlot(String),
    #[error("alias `{0}` refers to itself")]
    RecursiveAlias(String),
    #[error("mandatory count exceeds the number of templates")]
    MandatoryOutOfRange,
}
