//! Plank-assembly cabinet models: shape programs, exact three-view line
//! drawings, classical wireframe reconstruction, sequence encoding and
//! evaluation.

pub mod codec;
pub mod datagen;
pub mod degrade;
pub mod eval;
pub mod export;
pub mod geom;
pub mod program;
pub mod projector;
pub mod recon;
pub mod snap;

pub use codec::{decode_output, encode_input, encode_output, legal_pointer_mask, InputToken, OutputToken, SequenceSample};
pub use degrade::{inject_noise, strip_hidden, NoiseConfig};
pub use eval::{iou, match_planks, prf, MatchReport};
pub use geom::{Aabb, Dof, ResolvedPlank};
pub use program::{parse_program, print_program, CoordRef, Plank, Program, ProgramError};
pub use projector::{project, DrawingSet, Edge2D, View, ViewDrawing};
pub use recon::{verify_search, Candidates, ReconSolution, ReconStatus};
