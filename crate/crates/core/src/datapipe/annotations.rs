//! MIT-format annotation reader.
//!
//! Records are little-endian 16-bit words: the top 6 bits are the type code,
//! the low 10 bits a time increment. Codes 59..=63 are pseudo-records (SKIP,
//! NUM, SUB, CHN, AUX) and a zero word terminates the stream.

use super::beat::BeatClass;
use crate::{Error, Result};

const SKIP: u16 = 59;
const NUM: u16 = 60;
const SUB: u16 = 61;
const CHN: u16 = 62;
const AUX: u16 = 63;

/// A retained beat annotation at an absolute sample time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Annotation {
    pub time: u64,
    pub class: BeatClass,
}

/// N, L, R and paced ("/") beats; every other code is dropped.
fn retained_class(code: u16) -> Option<BeatClass> {
    match code {
        1 => Some(BeatClass::N),
        2 => Some(BeatClass::L),
        3 => Some(BeatClass::R),
        12 => Some(BeatClass::P),
        _ => None,
    }
}

pub fn read_annotations(bytes: &[u8]) -> Result<Vec<Annotation>> {
    let mut out = Vec::new();
    let mut time: u64 = 0;
    let mut pos = 0usize;
    let mut index = 0usize;
    let word_at = |p: usize| u16::from_le_bytes([bytes[p], bytes[p + 1]]);
    while pos < bytes.len() {
        if pos + 2 > bytes.len() {
            return Err(Error::Annotation {
                index,
                message: "odd trailing byte".into(),
            });
        }
        let word = word_at(pos);
        let code = word >> 10;
        let value = word & 0x03FF;
        pos += 2;
        match code {
            0 if value == 0 => break,
            SKIP => {
                if pos + 4 > bytes.len() {
                    return Err(Error::Annotation {
                        index,
                        message: "truncated SKIP interval".into(),
                    });
                }
                // PDP-11 long: high word first, each word little-endian.
                let hi = word_at(pos) as u32;
                let lo = word_at(pos + 2) as u32;
                let interval = ((hi << 16) | lo) as i32;
                pos += 4;
                time = time.checked_add_signed(interval as i64).ok_or_else(|| Error::Annotation {
                    index,
                    message: "SKIP moves time before the record start".into(),
                })?;
            }
            NUM | SUB | CHN => {}
            AUX => {
                let len = value as usize;
                let padded = len + (len & 1);
                if pos + padded > bytes.len() {
                    return Err(Error::Annotation {
                        index,
                        message: "truncated AUX payload".into(),
                    });
                }
                pos += padded;
            }
            _ => {
                time += value as u64;
                if let Some(class) = retained_class(code) {
                    out.push(Annotation { time, class });
                }
            }
        }
        index += 1;
    }
    Ok(out)
}
