pub mod field;
pub mod dynamics;
pub mod classify;
pub mod treegroup;
pub mod catalog;
pub mod lattes;
pub mod cli;
