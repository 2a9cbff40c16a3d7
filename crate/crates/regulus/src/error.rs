use thiserror::Error;

/// Stage names for the matrix linearization pipeline. Failure reports carry
/// the first stage whose verification did not hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineStage {
    /// Witness requested at the (halving diagonal, superdiagonal shift) pair.
    BasePair,
    /// Annihilation of the matrix units after the base-pair correction.
    MatrixUnits,
    /// Entrywise structure of the corrected map on sampled matrices.
    EntrywiseStructure,
    /// Diagonal shape of the corrected map on central generators.
    CenterExtraction,
    /// Additivity of the center restriction via split-diagonal witnesses.
    CenterAdditivity,
    /// Vanishing of residual diagonal entries against full-support probes.
    DiagonalResidual,
    /// Vanishing of residual entries against unit-entry probes.
    UnitEntryResidual,
    /// Vanishing of residual off-diagonal entries via modified probes.
    OffDiagonalResidual,
    /// Final residual check on sampled matrices.
    FinalResidual,
}

impl std::fmt::Display for PipelineStage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            PipelineStage::BasePair => "base-pair witness",
            PipelineStage::MatrixUnits => "matrix-unit annihilation",
            PipelineStage::EntrywiseStructure => "entrywise structure",
            PipelineStage::CenterExtraction => "center extraction",
            PipelineStage::CenterAdditivity => "center additivity",
            PipelineStage::DiagonalResidual => "diagonal residual",
            PipelineStage::UnitEntryResidual => "unit-entry residual",
            PipelineStage::OffDiagonalResidual => "off-diagonal residual",
            PipelineStage::FinalResidual => "final residual",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EngineError {
    #[error("values belong to different atom spaces")]
    SpaceMismatch,
    #[error("an atom space needs between 1 and 64 atoms, got {0}")]
    BadAtomCount(usize),
    #[error("atom weights must be strictly positive")]
    NonPositiveWeight,
    #[error("at most 64 variables are supported, got {0}")]
    TooManyVariables(usize),
    #[error("invalid variable name {0:?}")]
    BadVariableName(String),
    #[error("duplicate variable name {0:?}")]
    DuplicateVariableName(String),
    #[error("atom index {0} out of range")]
    AtomOutOfRange(usize),
    #[error("variable index {0} out of range")]
    VariableOutOfRange(usize),
    #[error("zero denominator in rational function")]
    ZeroDenominator,
    #[error("division by an element with a vanishing stalk on atom {0}")]
    StalkDivisionByZero(usize),
    #[error("matrix dimensions {0} and {1} do not match")]
    DimensionMismatch(usize, usize),
    #[error("matrix dimension must be at least 1, got {0}")]
    BadDimension(usize),
    #[error("matrix linearization needs dimension at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("empty element list")]
    EmptyList,
    #[error("duplicate variable in prescribed values")]
    DuplicatePrescription,
    #[error("value prescribed on atom {atom} where the element is not weakly transcendental over the base variables")]
    NotWeaklyTranscendental { atom: usize },
    #[error("no free variable with nonzero partial derivative on atom {atom}")]
    NoFreeVariable { atom: usize },
    #[error("evaluation table is not the action of any matrix derivation: residual at {basis}")]
    DecompositionResidual { basis: String },
    #[error("witness disagrees with the map at {point}: expected {expected}, witness gives {got}")]
    WitnessMismatch {
        point: String,
        expected: String,
        got: String,
    },
    #[error("linearization failed at the {stage} stage: {detail}")]
    Linearize {
        stage: PipelineStage,
        detail: String,
    },
    #[error("commutant analysis needs a matrix with finitely valued constant entries")]
    NonConstantMatrix,
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, EngineError>;
