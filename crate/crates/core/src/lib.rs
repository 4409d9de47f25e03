//! Finite quotients of von Dyck groups: coset enumeration, permutation
//! group algorithms, Smith normal forms and PSL(2, q) epimorphism search.

pub mod corpus;
pub mod matgrp;
pub mod permgrp;
pub mod todd_coxeter;
pub mod vondyck;
pub mod words;
pub mod zlinalg;
