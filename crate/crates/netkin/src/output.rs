//! CSV writers. Every file starts with a header row and floats carry nine
//! significant digits.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use netkin_core::diagnostics::EntropyReport;
use netkin_core::halfmoment::HalfMomentField;
use netkin_core::kinetic::KineticField;
use netkin_core::{MacroState, Network};

use crate::error::{Error, Result};

pub fn fmt(x: f64) -> String {
    format!("{x:.8e}")
}

type Rows = csv::Result<()>;

fn write_csv<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut csv::Writer<File>) -> Rows,
{
    let file = File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let mut w = csv::Writer::from_writer(file);
    let wrap = |source| Error::Csv { path: path.to_path_buf(), source };
    body(&mut w).map_err(wrap)?;
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// `edge,x,rho,q` at cell centres.
pub fn macro_snapshot<W: Write>(w: &mut csv::Writer<W>, network: &Network, states: &[Vec<MacroState>]) -> Rows {
    w.write_record(["edge", "x", "rho", "q"])?;
    for (edge, cells) in network.edges.iter().zip(states) {
        for (x, s) in edge.centers().zip(cells) {
            w.write_record([edge.id.to_string(), fmt(x), fmt(s.rho), fmt(s.q)])?;
        }
    }
    Ok(())
}

/// `edge,x,rho,q,rho_hat,q_hat`.
pub fn halfmoment_snapshot<W: Write>(w: &mut csv::Writer<W>, network: &Network, field: &HalfMomentField) -> Rows {
    w.write_record(["edge", "x", "rho", "q", "rho_hat", "q_hat"])?;
    for (edge, cells) in network.edges.iter().zip(&field.cells) {
        for (x, s) in edge.centers().zip(cells) {
            w.write_record([edge.id.to_string(), fmt(x), fmt(s.rho()), fmt(s.q()), fmt(s.rho_hat()), fmt(s.q_hat())])?;
        }
    }
    Ok(())
}

/// Full distribution dump `edge,x,v,f`.
pub fn kinetic_dump<W: Write>(w: &mut csv::Writer<W>, network: &Network, field: &KineticField) -> Rows {
    w.write_record(["edge", "x", "v", "f"])?;
    for (k, edge) in network.edges.iter().enumerate() {
        for (i, x) in edge.centers().enumerate() {
            for (v, f) in field.grid.velocities().iter().zip(field.cell(k, i)) {
                w.write_record([edge.id.to_string(), fmt(x), fmt(*v), fmt(*f)])?;
            }
        }
    }
    Ok(())
}

/// `t,total_entropy,total_mass`.
pub fn entropy_series<W: Write>(w: &mut csv::Writer<W>, reports: &[EntropyReport]) -> Rows {
    w.write_record(["t", "total_entropy", "total_mass"])?;
    for r in reports {
        w.write_record([fmt(r.t), fmt(r.total_entropy), fmt(r.total_mass)])?;
    }
    Ok(())
}

pub fn write_macro_snapshot(path: &Path, network: &Network, states: &[Vec<MacroState>]) -> Result<()> {
    write_csv(path, |w| macro_snapshot(w, network, states))
}

pub fn write_halfmoment_snapshot(path: &Path, network: &Network, field: &HalfMomentField) -> Result<()> {
    write_csv(path, |w| halfmoment_snapshot(w, network, field))
}

pub fn write_kinetic_dump(path: &Path, network: &Network, field: &KineticField) -> Result<()> {
    write_csv(path, |w| kinetic_dump(w, network, field))
}

pub fn write_entropy_series(path: &Path, reports: &[EntropyReport]) -> Result<()> {
    write_csv(path, |w| entropy_series(w, reports))
}

/// Writes a header and rows of preformatted cells.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    write_csv(path, |w| table(w, header, rows))
}

pub fn table<W: Write>(w: &mut csv::Writer<W>, header: &[&str], rows: &[Vec<String>]) -> Rows {
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(())
}

/// Renders a table to a string, for printing.
pub fn table_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    table(&mut w, header, rows).expect("writing to memory cannot fail");
    String::from_utf8(w.into_inner().expect("flushing memory cannot fail")).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use netkin_core::topology::tripod;
    use netkin_core::CouplingKind;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt(0.7222222222222222), "7.22222222e-1");
        assert_eq!(fmt(-6.2494790e-3), "-6.24947900e-3");
        assert_eq!(fmt(0.0), "0.00000000e0");
    }

    #[test]
    fn snapshot_layout() {
        let net = tripod(2, CouplingKind::EqualDensity).unwrap();
        let states = vec![vec![MacroState::new(1.0, 0.5); 2]; 3];
        let mut w = csv::Writer::from_writer(Vec::new());
        macro_snapshot(&mut w, &net, &states).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "edge,x,rho,q");
        assert_eq!(lines[1], "1,2.50000000e-1,1.00000000e0,5.00000000e-1");
        assert_eq!(lines[6], "3,7.50000000e-1,1.00000000e0,5.00000000e-1");
    }

    #[test]
    fn table_rendering() {
        let s = table_string(&["epsilon", "distance"], &[vec![fmt(0.1), fmt(0.25)]]);
        assert_eq!(s, "epsilon,distance\n1.00000000e-1,2.50000000e-1\n");
    }
}
