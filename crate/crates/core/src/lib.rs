pub mod error;
pub mod families;
pub mod fibrations;
pub mod field;
pub mod gauss_dual;
pub mod ideal;
pub mod json;
pub mod linalg;
pub mod pic_lattice;
pub mod poly;
pub mod roots;
pub mod singularities;
pub mod solve;
pub mod uni;
