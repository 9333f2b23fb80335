pub mod cli;
pub mod cosets;
pub mod iwahori_weyl;
pub mod linalg;
pub mod oracle;
pub mod rootsys;
pub mod verify;
