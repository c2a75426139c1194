//! Marlin-compatible G-code emission and parsing with relative volumetric
//! extrusion (`M83`, E in mm³). Serialization is canonical: fixed 5-decimal
//! parameter formatting, `\n` newlines, file ends with a newline, so
//! emit → parse → emit is byte-identical.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{extrusion_amount, CalibrationTable, MoveKind, PrinterProfile, Toolpath};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GCodeCommand {
    /// Code word, e.g. `G1`, `M104`, `T0`.
    pub code: String,
    /// Ordered letter/value parameters.
    pub params: Vec<(char, f64)>,
    /// 1-based source line (0 for generated commands).
    pub line_no: usize,
}

impl GCodeCommand {
    fn new(code: &str, params: &[(char, f64)]) -> Self {
        GCodeCommand {
            code: code.to_string(),
            params: params.to_vec(),
            line_no: 0,
        }
    }

    pub fn param(&self, letter: char) -> Option<f64> {
        self.params.iter().find(|&&(l, _)| l == letter).map(|&(_, v)| v)
    }

    fn to_line(&self) -> String {
        let mut s = self.code.clone();
        for &(l, v) in &self.params {
            s.push(' ');
            s.push(l);
            s.push_str(&format!("{v:.5}"));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GCodeProgram {
    pub commands: Vec<GCodeCommand>,
}

impl GCodeProgram {
    /// Canonical text form (what [`emit_gcode`] writes).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.commands {
            s.push_str(&c.to_line());
            s.push('\n');
        }
        s
    }

    /// Dialect invariant: every `G1` carrying `E` also moves in X and/or Y.
    pub fn validate(&self) -> Result<()> {
        for c in &self.commands {
            if c.code == "G1" && c.param('E').is_some() && c.param('X').is_none() && c.param('Y').is_none() {
                return Err(Error::invalid(format!(
                    "line {}: G1 with E but no X/Y motion",
                    c.line_no
                )));
            }
        }
        Ok(())
    }
}

/// Serialize a toolpath as G-code. Returns the program and its canonical
/// text. Coordinates are shifted to the profile's bed centre; E values come
/// from [`extrusion_amount`] under the given calibration table.
pub fn emit_gcode(
    toolpath: &Toolpath,
    profile: &PrinterProfile,
    calibration: &CalibrationTable,
) -> Result<(GCodeProgram, String)> {
    toolpath.validate()?;
    calibration.validate()?;
    let mut prog = GCodeProgram::default();
    prog.commands.push(GCodeCommand::new("G21", &[]));
    prog.commands.push(GCodeCommand::new("G90", &[]));
    prog.commands.push(GCodeCommand::new("M83", &[]));
    for t in &profile.tools {
        prog.commands.push(GCodeCommand::new(
            "M104",
            &[('S', t.nozzle_temp_c), ('T', t.index as f64)],
        ));
    }
    for t in &profile.tools {
        prog.commands.push(GCodeCommand::new(
            "M109",
            &[('S', t.nozzle_temp_c), ('T', t.index as f64)],
        ));
    }

    let ox = profile.bed_center_x_mm;
    let oy = profile.bed_center_y_mm;
    let mut current_tool: Option<u8> = None;
    let mut prev_kind: Option<MoveKind> = None;
    for m in &toolpath.moves {
        if current_tool != Some(m.tool) {
            prog.commands.push(GCodeCommand::new(&format!("T{}", m.tool), &[]));
            current_tool = Some(m.tool);
        }
        let run_start = m.kind == MoveKind::Extrude && prev_kind != Some(MoveKind::Extrude);
        let f_mm_min = m.feedrate * 60.0;
        match m.kind {
            MoveKind::Travel => {
                if prev_kind == Some(MoveKind::Extrude) && profile.retract_e_mm3 > 0.0 {
                    prog.commands.push(GCodeCommand::new(
                        "G1",
                        &[
                            ('X', m.start[0] + ox),
                            ('Y', m.start[1] + oy),
                            ('E', -profile.retract_e_mm3),
                            ('F', f_mm_min),
                        ],
                    ));
                }
                prog.commands.push(GCodeCommand::new(
                    "G0",
                    &[
                        ('X', m.end[0] + ox),
                        ('Y', m.end[1] + oy),
                        ('Z', m.end[2]),
                        ('F', f_mm_min),
                    ],
                ));
            }
            MoveKind::Extrude => {
                if run_start && profile.prime_e_mm3 > 0.0 {
                    prog.commands.push(GCodeCommand::new(
                        "G1",
                        &[
                            ('X', m.start[0] + ox),
                            ('Y', m.start[1] + oy),
                            ('E', profile.prime_e_mm3),
                            ('F', f_mm_min),
                        ],
                    ));
                }
                let e = extrusion_amount(
                    m.length(),
                    m.width,
                    toolpath.layer_height,
                    toolpath.extrusion_multiplier,
                    calibration,
                    m.feedrate,
                )?;
                prog.commands.push(GCodeCommand::new(
                    "G1",
                    &[
                        ('X', m.end[0] + ox),
                        ('Y', m.end[1] + oy),
                        ('Z', m.end[2]),
                        ('E', e),
                        ('F', f_mm_min),
                    ],
                ));
            }
        }
        prev_kind = Some(m.kind);
    }

    for t in &profile.tools {
        prog.commands.push(GCodeCommand::new("M104", &[('S', 0.0), ('T', t.index as f64)]));
    }
    let text = prog.to_text();
    Ok((prog, text))
}

/// Parse G-code text: the emit dialect plus `;` comments and blank lines.
/// Unknown codes are preserved as opaque commands.
pub fn parse_gcode(text: &str) -> Result<GCodeProgram> {
    let mut prog = GCodeProgram::default();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find(';') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let code_tok = tokens.next().unwrap();
        let code = parse_code_word(code_tok, line_no)?;
        let mut params = Vec::new();
        for tok in tokens {
            params.push(parse_param_word(tok, line_no)?);
        }
        prog.commands.push(GCodeCommand {
            code,
            params,
            line_no,
        });
    }
    Ok(prog)
}

fn parse_code_word(tok: &str, line: usize) -> Result<String> {
    let mut chars = tok.chars();
    let letter = chars.next().unwrap();
    if !letter.is_ascii_alphabetic() {
        return Err(Error::Parse {
            line,
            message: format!("code word '{tok}' must start with a letter"),
        });
    }
    let rest = chars.as_str();
    if !rest.is_empty() && rest.parse::<f64>().is_err() {
        return Err(Error::Parse {
            line,
            message: format!("malformed code word '{tok}'"),
        });
    }
    Ok(tok.to_ascii_uppercase())
}

fn parse_param_word(tok: &str, line: usize) -> Result<(char, f64)> {
    let mut chars = tok.chars();
    let letter = chars.next().unwrap();
    if !letter.is_ascii_alphabetic() {
        return Err(Error::Parse {
            line,
            message: format!("parameter '{tok}' must start with a letter"),
        });
    }
    let value: f64 = chars.as_str().parse().map_err(|_| Error::Parse {
        line,
        message: format!("malformed parameter '{tok}'"),
    })?;
    Ok((letter.to_ascii_uppercase(), value))
}
