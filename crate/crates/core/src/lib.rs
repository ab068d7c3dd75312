pub mod cone;
pub mod derivatives;
pub mod division;
pub mod error;
pub mod flats;
pub mod frobenius;
pub mod jordan;
pub mod taylor;
