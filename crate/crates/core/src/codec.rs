//! Ragnarock level-document codec.
//!
//! Parses and serializes `Info.dat` and per-difficulty map documents, and
//! converts between note lists and the flattened 3x4 grid-symbol strings
//! used as sequence-model tokens.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Grid geometry: 3 layers (rows) by 4 columns.
pub const GRID_LAYERS: usize = 3;
pub const GRID_COLUMNS: usize = 4;
pub const GRID_CELLS: usize = GRID_LAYERS * GRID_COLUMNS;

/// Cell token for "no rune here".
pub const EMPTY_CELL: &str = "n9";

/// Grid-symbol string length: 12 cells, two characters each.
pub const SYMBOL_LEN: usize = GRID_CELLS * 2;

/// In-game limit: the player has two hammers, so a timestamp can carry at
/// most two runes.
pub const MAX_NOTES_PER_TIMESTAMP: usize = 2;

#[derive(Debug, thiserror::Error)]
pub enum CodecError {
    #[error("malformed document: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("note {index}: {field} = {value} out of range (max {max})")]
    FieldRange {
        index: usize,
        field: &'static str,
        value: i64,
        max: u8,
    },
    #[error("note {index}: time {value} is negative or not finite")]
    InvalidTime { index: usize, value: f64 },
    #[error("notes not sorted by time at index {0}")]
    Unsorted(usize),
    #[error("timestamp group at beat {time} has {count} notes, expected at most {MAX_NOTES_PER_TIMESTAMP}")]
    OversizedGroup { time: f64, count: usize },
    #[error("duplicate grid cell (layer {layer}, column {column}) in timestamp group")]
    DuplicateCell { layer: u8, column: u8 },
    #[error("timestamp group mixes beat times {first} and {other}")]
    MixedTimes { first: f64, other: f64 },
    #[error("grid symbol must be {SYMBOL_LEN} characters, got {0}")]
    SymbolLength(usize),
    #[error("invalid grid token {token:?} at cell {cell}")]
    SymbolToken { cell: usize, token: String },
    #[error("beats per minute must be positive, got {0}")]
    InvalidBpm(f64),
    #[error("duplicate beatmap filename {0:?}")]
    DuplicateBeatmapFilename(String),
}

/// Level difficulty tier, as named by map files (`Easy.dat` .. `ExpertPlus.dat`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Difficulty {
    Easy,
    Normal,
    Hard,
    Expert,
    ExpertPlus,
}

impl Difficulty {
    pub const ALL: [Difficulty; 5] = [
        Difficulty::Easy,
        Difficulty::Normal,
        Difficulty::Hard,
        Difficulty::Expert,
        Difficulty::ExpertPlus,
    ];

    /// In-game rank shown to the player (Easy spans levels 1-2, ... Expert+ 9-10).
    pub fn rank(self) -> u8 {
        match self {
            Difficulty::Easy => 1,
            Difficulty::Normal => 3,
            Difficulty::Hard => 5,
            Difficulty::Expert => 7,
            Difficulty::ExpertPlus => 9,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Difficulty::Easy => "Easy",
            Difficulty::Normal => "Normal",
            Difficulty::Hard => "Hard",
            Difficulty::Expert => "Expert",
            Difficulty::ExpertPlus => "ExpertPlus",
        }
    }

    /// Map file name inside a level folder.
    pub fn file_name(self) -> String {
        format!("{}.dat", self.as_str())
    }
}

impl std::str::FromStr for Difficulty {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "easy" => Ok(Difficulty::Easy),
            "normal" => Ok(Difficulty::Normal),
            "hard" => Ok(Difficulty::Hard),
            "expert" => Ok(Difficulty::Expert),
            "expertplus" | "expert+" | "expert-plus" => Ok(Difficulty::ExpertPlus),
            _ => Err(format!("unknown difficulty {s:?}")),
        }
    }
}

impl fmt::Display for Difficulty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One rune event: beat time plus grid position, rune type and cut direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Note {
    #[serde(rename = "_time", serialize_with = "serialize_beats")]
    pub time: f64,
    #[serde(rename = "_lineIndex")]
    pub line_index: u8,
    #[serde(rename = "_lineLayer")]
    pub line_layer: u8,
    #[serde(rename = "_type")]
    pub note_type: u8,
    #[serde(rename = "_cutDirection")]
    pub cut_direction: u8,
}

/// Integral beat times are written without a fractional part (`4`, not `4.0`),
/// matching the documents the game ships with.
fn serialize_beats<S: Serializer>(time: &f64, s: S) -> Result<S::Ok, S::Error> {
    if time.fract() == 0.0 && time.abs() <= (i64::MAX as f64) {
        s.serialize_i64(*time as i64)
    } else {
        s.serialize_f64(*time)
    }
}

impl Note {
    pub fn new(
        time: f64,
        line_index: u8,
        line_layer: u8,
        note_type: u8,
        cut_direction: u8,
    ) -> Result<Self, CodecError> {
        let note = Note {
            time,
            line_index,
            line_layer,
            note_type,
            cut_direction,
        };
        note.validate(0)?;
        Ok(note)
    }

    /// Flat cell index in row-major (layer, column) order.
    pub fn cell(&self) -> usize {
        self.line_layer as usize * GRID_COLUMNS + self.line_index as usize
    }

    fn validate(&self, index: usize) -> Result<(), CodecError> {
        if !self.time.is_finite() || self.time < 0.0 {
            return Err(CodecError::InvalidTime {
                index,
                value: self.time,
            });
        }
        let checks: [(&'static str, u8, u8); 4] = [
            ("_lineIndex", self.line_index, GRID_COLUMNS as u8 - 1),
            ("_lineLayer", self.line_layer, GRID_LAYERS as u8 - 1),
            ("_type", self.note_type, 9),
            ("_cutDirection", self.cut_direction, 9),
        ];
        for (field, value, max) in checks {
            if value > max {
                return Err(CodecError::FieldRange {
                    index,
                    field,
                    value: value as i64,
                    max,
                });
            }
        }
        Ok(())
    }
}

/// Flattened 3x4 grid state at one timestamp: twelve two-character cell
/// tokens, each either `n9` (empty) or a type digit followed by a
/// cut-direction digit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridSymbol(String);

impl GridSymbol {
    /// The all-empty grid, `"n9"` twelve times.
    pub fn empty() -> Self {
        GridSymbol(EMPTY_CELL.repeat(GRID_CELLS))
    }

    /// Validate and wrap a 24-character symbol string.
    pub fn parse(text: &str) -> Result<Self, CodecError> {
        if text.len() != SYMBOL_LEN || !text.is_ascii() {
            return Err(CodecError::SymbolLength(text.len()));
        }
        for cell in 0..GRID_CELLS {
            let token = &text[cell * 2..cell * 2 + 2];
            let bytes = token.as_bytes();
            let valid = token == EMPTY_CELL
                || (bytes[0].is_ascii_digit() && bytes[1].is_ascii_digit());
            if !valid {
                return Err(CodecError::SymbolToken {
                    cell,
                    token: token.to_string(),
                });
            }
        }
        Ok(GridSymbol(text.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Number of cells holding a rune.
    pub fn occupied_cells(&self) -> usize {
        (0..GRID_CELLS)
            .filter(|cell| &self.0[cell * 2..cell * 2 + 2] != EMPTY_CELL)
            .count()
    }

    pub fn is_empty_grid(&self) -> bool {
        self.occupied_cells() == 0
    }
}

impl fmt::Display for GridSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for GridSymbol {
    type Error = CodecError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        GridSymbol::parse(&value)
    }
}

impl From<GridSymbol> for String {
    fn from(value: GridSymbol) -> Self {
        value.0
    }
}

/// Encode the notes sharing one timestamp into a grid symbol: start from the
/// all-empty grid, write the `type + cut_direction` digit pair at each note's
/// (layer, column) cell, and flatten row-major.
pub fn encode_timestamp_group(notes: &[Note]) -> Result<GridSymbol, CodecError> {
    if notes.len() > MAX_NOTES_PER_TIMESTAMP {
        return Err(CodecError::OversizedGroup {
            time: notes[0].time,
            count: notes.len(),
        });
    }
    let mut cells = vec![None; GRID_CELLS];
    for (i, note) in notes.iter().enumerate() {
        note.validate(i)?;
        if note.time != notes[0].time {
            return Err(CodecError::MixedTimes {
                first: notes[0].time,
                other: note.time,
            });
        }
        let slot = &mut cells[note.cell()];
        if slot.is_some() {
            return Err(CodecError::DuplicateCell {
                layer: note.line_layer,
                column: note.line_index,
            });
        }
        *slot = Some((note.note_type, note.cut_direction));
    }
    let mut text = String::with_capacity(SYMBOL_LEN);
    for cell in cells {
        match cell {
            Some((ty, cut)) => {
                text.push((b'0' + ty) as char);
                text.push((b'0' + cut) as char);
            }
            None => text.push_str(EMPTY_CELL),
        }
    }
    Ok(GridSymbol(text))
}

/// Inverse of [`encode_timestamp_group`]: one note per occupied cell, placed
/// at the given beat time. Notes come out in cell order.
pub fn decode_symbol(symbol: &GridSymbol, time: f64) -> Result<Vec<Note>, CodecError> {
    if !time.is_finite() || time < 0.0 {
        return Err(CodecError::InvalidTime {
            index: 0,
            value: time,
        });
    }
    let text = symbol.as_str();
    let mut notes = Vec::new();
    for cell in 0..GRID_CELLS {
        let token = &text[cell * 2..cell * 2 + 2];
        if token == EMPTY_CELL {
            continue;
        }
        let bytes = token.as_bytes();
        notes.push(Note {
            time,
            line_index: (cell % GRID_COLUMNS) as u8,
            line_layer: (cell / GRID_COLUMNS) as u8,
            note_type: bytes[0] - b'0',
            cut_direction: bytes[1] - b'0',
        });
    }
    Ok(notes)
}

/// One difficulty's note list, ordered by beat time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DifficultyMap {
    pub notes: Vec<Note>,
}

impl DifficultyMap {
    pub fn new(notes: Vec<Note>) -> Self {
        DifficultyMap { notes }
    }

    /// Check the full invariant set: per-note field ranges, non-decreasing
    /// times, and at most two notes per timestamp.
    ///
    /// Parsing does not enforce the two-note cap (community maps contain
    /// oversized groups, which corpus ingestion drops as outliers), but
    /// serialization does.
    pub fn validate(&self) -> Result<(), CodecError> {
        for (i, note) in self.notes.iter().enumerate() {
            note.validate(i)?;
            if i > 0 && note.time < self.notes[i - 1].time {
                return Err(CodecError::Unsorted(i));
            }
        }
        let mut start = 0;
        while start < self.notes.len() {
            let time = self.notes[start].time;
            let mut end = start + 1;
            while end < self.notes.len() && self.notes[end].time == time {
                end += 1;
            }
            if end - start > MAX_NOTES_PER_TIMESTAMP {
                return Err(CodecError::OversizedGroup {
                    time,
                    count: end - start,
                });
            }
            start = end;
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct RawDifficultyMap {
    #[serde(rename = "_notes")]
    notes: Vec<RawNote>,
}

#[derive(Deserialize)]
struct RawNote {
    #[serde(rename = "_time")]
    time: f64,
    #[serde(rename = "_lineIndex")]
    line_index: i64,
    #[serde(rename = "_lineLayer")]
    line_layer: i64,
    #[serde(rename = "_type")]
    note_type: i64,
    #[serde(rename = "_cutDirection")]
    cut_direction: i64,
}

/// Parse a difficulty map document. Note order is preserved; see
/// [`DifficultyMap::validate`] for what parsing does and does not enforce.
pub fn parse_difficulty_map(document: &str) -> Result<DifficultyMap, CodecError> {
    let raw: RawDifficultyMap = serde_json::from_str(document)?;
    let mut notes = Vec::with_capacity(raw.notes.len());
    for (index, raw_note) in raw.notes.into_iter().enumerate() {
        let fields = [
            ("_lineIndex", raw_note.line_index, GRID_COLUMNS as u8 - 1),
            ("_lineLayer", raw_note.line_layer, GRID_LAYERS as u8 - 1),
            ("_type", raw_note.note_type, 9),
            ("_cutDirection", raw_note.cut_direction, 9),
        ];
        for (field, value, max) in fields {
            if value < 0 || value > max as i64 {
                return Err(CodecError::FieldRange {
                    index,
                    field,
                    value,
                    max,
                });
            }
        }
        if !raw_note.time.is_finite() || raw_note.time < 0.0 {
            return Err(CodecError::InvalidTime {
                index,
                value: raw_note.time,
            });
        }
        notes.push(Note {
            time: raw_note.time,
            line_index: raw_note.line_index as u8,
            line_layer: raw_note.line_layer as u8,
            note_type: raw_note.note_type as u8,
            cut_direction: raw_note.cut_direction as u8,
        });
    }
    Ok(DifficultyMap { notes })
}

/// Serialize a difficulty map after checking its invariants.
pub fn serialize_difficulty_map(map: &DifficultyMap) -> Result<String, CodecError> {
    map.validate()?;
    #[derive(Serialize)]
    struct Doc<'a> {
        #[serde(rename = "_notes")]
        notes: &'a [Note],
    }
    Ok(serde_json::to_string(&Doc { notes: &map.notes })?)
}

/// One entry of `_difficultyBeatmapSets`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeatmapSet {
    #[serde(rename = "_difficulty", alias = "difficulty")]
    pub difficulty: Difficulty,
    #[serde(rename = "_difficultyRank", alias = "difficultyRank")]
    pub difficulty_rank: u8,
    #[serde(rename = "_beatmapFilename", alias = "beatmapFilename")]
    pub beatmap_filename: String,
    #[serde(rename = "_noteJumpMovementSpeed", alias = "noteJumpMovementSpeed")]
    pub note_jump_movement_speed: f64,
    #[serde(rename = "_noteJumpStartBeatOffset", alias = "noteJumpStartBeatOffset")]
    pub note_jump_start_beat_offset: f64,
}

impl BeatmapSet {
    /// Entry with the defaults the game is happy with.
    pub fn with_defaults(difficulty: Difficulty) -> Self {
        BeatmapSet {
            difficulty,
            difficulty_rank: difficulty.rank(),
            beatmap_filename: difficulty.file_name(),
            note_jump_movement_speed: 10.0,
            note_jump_start_beat_offset: 0.0,
        }
    }
}

/// General level information (`Info.dat`).
///
/// Keys are written with the `_songName`-style prefix used by level folders
/// in the wild; the bare names are accepted as aliases when parsing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoDocument {
    #[serde(rename = "_songName", alias = "songName")]
    pub song_name: String,
    #[serde(rename = "_songSubName", alias = "songSubName", default)]
    pub song_sub_name: String,
    #[serde(rename = "_songAuthorName", alias = "songAuthorName")]
    pub song_author_name: String,
    #[serde(rename = "_levelAuthorName", alias = "levelAuthorName")]
    pub level_author_name: String,
    #[serde(rename = "_beatsPerMinute", alias = "beatsPerMinute")]
    pub beats_per_minute: f64,
    #[serde(rename = "_songFilename", alias = "songFilename")]
    pub song_filename: String,
    #[serde(rename = "_coverImageFilename", alias = "coverImageFilename")]
    pub cover_image_filename: String,
    #[serde(rename = "_difficultyBeatmapSets", alias = "difficultyBeatmapSets")]
    pub difficulty_beatmap_sets: Vec<BeatmapSet>,
}

impl InfoDocument {
    fn validate(&self) -> Result<(), CodecError> {
        if !self.beats_per_minute.is_finite() || self.beats_per_minute <= 0.0 {
            return Err(CodecError::InvalidBpm(self.beats_per_minute));
        }
        for (i, set) in self.difficulty_beatmap_sets.iter().enumerate() {
            if self.difficulty_beatmap_sets[..i]
                .iter()
                .any(|other| other.beatmap_filename == set.beatmap_filename)
            {
                return Err(CodecError::DuplicateBeatmapFilename(
                    set.beatmap_filename.clone(),
                ));
            }
        }
        Ok(())
    }
}

/// Parse an `Info.dat` document.
pub fn parse_info(document: &str) -> Result<InfoDocument, CodecError> {
    let info: InfoDocument = serde_json::from_str(document)?;
    info.validate()?;
    Ok(info)
}

/// Serialize an `Info.dat` document after checking its invariants.
pub fn serialize_info(info: &InfoDocument) -> Result<String, CodecError> {
    info.validate()?;
    Ok(serde_json::to_string(info)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// The map document of the paper's example level, first four notes.
    pub(crate) const EXAMPLE_MAP: &str = r#"{
        "_notes": [
            {"_time": 4,   "_lineIndex": 0, "_lineLayer": 1, "_type": 0, "_cutDirection": 1},
            {"_time": 4,   "_lineIndex": 1, "_lineLayer": 1, "_type": 0, "_cutDirection": 1},
            {"_time": 4,   "_lineIndex": 2, "_lineLayer": 1, "_type": 0, "_cutDirection": 1},
            {"_time": 4.5, "_lineIndex": 1, "_lineLayer": 1, "_type": 0, "_cutDirection": 1}
        ]
    }"#;

    fn note(time: f64, column: u8, layer: u8) -> Note {
        Note::new(time, column, layer, 0, 1).unwrap()
    }

    #[test]
    fn parses_example_map() {
        let map = parse_difficulty_map(EXAMPLE_MAP).unwrap();
        assert_eq!(map.notes.len(), 4);
        assert_eq!(map.notes[0], note(4.0, 0, 1));
        assert_eq!(map.notes[1], note(4.0, 1, 1));
        assert_eq!(map.notes[2], note(4.0, 2, 1));
        assert_eq!(map.notes[3], note(4.5, 1, 1));
    }

    #[test]
    fn parses_empty_notes_array() {
        let map = parse_difficulty_map(r#"{"_notes": []}"#).unwrap();
        assert!(map.notes.is_empty());
    }

    #[test]
    fn parse_error_names_missing_key() {
        let err = parse_difficulty_map(r#"{"_notes": [{"_time": 1}]}"#).unwrap_err();
        assert!(err.to_string().contains("_lineIndex"), "{err}");
    }

    #[test]
    fn parse_rejects_out_of_range_fields() {
        let doc = r#"{"_notes": [{"_time": 1, "_lineIndex": 4, "_lineLayer": 0, "_type": 0, "_cutDirection": 1}]}"#;
        let err = parse_difficulty_map(doc).unwrap_err();
        assert!(matches!(
            err,
            CodecError::FieldRange {
                field: "_lineIndex",
                value: 4,
                ..
            }
        ));
        let doc = r#"{"_notes": [{"_time": 1, "_lineIndex": 0, "_lineLayer": 3, "_type": 0, "_cutDirection": 1}]}"#;
        assert!(parse_difficulty_map(doc).is_err());
    }

    #[test]
    fn serialize_writes_integral_times_bare() {
        let map = DifficultyMap::new(vec![note(4.0, 0, 1)]);
        let doc = serialize_difficulty_map(&map).unwrap();
        assert!(doc.contains("\"_time\":4,"), "{doc}");
        let value: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(value["_notes"][0]["_time"], serde_json::json!(4));
    }

    #[test]
    fn serialize_empty_map() {
        let doc = serialize_difficulty_map(&DifficultyMap::default()).unwrap();
        assert_eq!(doc, r#"{"_notes":[]}"#);
    }

    #[test]
    fn serialize_rejects_unsorted_and_oversized() {
        let unsorted = DifficultyMap::new(vec![note(2.0, 0, 1), note(1.0, 0, 1)]);
        assert!(matches!(
            serialize_difficulty_map(&unsorted),
            Err(CodecError::Unsorted(1))
        ));
        let oversized = DifficultyMap::new(vec![note(1.0, 0, 1), note(1.0, 1, 1), note(1.0, 2, 1)]);
        assert!(matches!(
            serialize_difficulty_map(&oversized),
            Err(CodecError::OversizedGroup { count: 3, .. })
        ));
    }

    #[test]
    fn encodes_single_note() {
        // Cell (layer 1, column 1) carries type 0, cut 1.
        let symbol = encode_timestamp_group(&[note(4.0, 1, 1)]).unwrap();
        assert_eq!(symbol.as_str(), "n9n9n9n9n901n9n9n9n9n9n9");
    }

    #[test]
    fn encodes_pair() {
        let symbol = encode_timestamp_group(&[note(4.0, 0, 1), note(4.0, 1, 1)]).unwrap();
        assert_eq!(symbol.as_str(), "n9n9n9n90101n9n9n9n9n9n9");
        assert_eq!(symbol.occupied_cells(), 2);
    }

    #[test]
    fn encodes_empty_group_as_default_grid() {
        let symbol = encode_timestamp_group(&[]).unwrap();
        assert_eq!(symbol, GridSymbol::empty());
        assert_eq!(symbol.as_str(), EMPTY_CELL.repeat(GRID_CELLS));
    }

    #[test]
    fn encode_rejects_oversized_group() {
        let group = [note(4.0, 0, 1), note(4.0, 1, 1), note(4.0, 2, 1)];
        assert!(matches!(
            encode_timestamp_group(&group),
            Err(CodecError::OversizedGroup { count: 3, .. })
        ));
    }

    #[test]
    fn encode_rejects_duplicate_cell_and_mixed_times() {
        let dup = [note(4.0, 1, 1), note(4.0, 1, 1)];
        assert!(matches!(
            encode_timestamp_group(&dup),
            Err(CodecError::DuplicateCell {
                layer: 1,
                column: 1
            })
        ));
        let mixed = [note(4.0, 0, 1), note(4.5, 1, 1)];
        assert!(matches!(
            encode_timestamp_group(&mixed),
            Err(CodecError::MixedTimes { .. })
        ));
    }

    #[test]
    fn decodes_empty_symbol() {
        assert!(decode_symbol(&GridSymbol::empty(), 7.0).unwrap().is_empty());
    }

    #[test]
    fn decodes_single_note_symbol() {
        let symbol = GridSymbol::parse("n9n9n9n901n9n9n9n9n9n9n9").unwrap();
        let notes = decode_symbol(&symbol, 4.0).unwrap();
        assert_eq!(notes, vec![note(4.0, 0, 1)]);
    }

    #[test]
    fn symbol_parse_rejects_bad_input() {
        assert!(matches!(
            GridSymbol::parse("n9"),
            Err(CodecError::SymbolLength(2))
        ));
        let err = GridSymbol::parse("x9n9n9n9n9n9n9n9n9n9n9n9").unwrap_err();
        assert!(matches!(err, CodecError::SymbolToken { cell: 0, .. }));
    }

    /// Every 1- and 2-note group over all cells round-trips through
    /// encode/decode, for the observed digit pair (0,1) plus a fuzz set.
    #[test]
    fn exhaustive_group_roundtrip() {
        let digit_pairs: [(u8, u8); 5] = [(0, 1), (1, 3), (9, 9), (2, 0), (5, 7)];
        let mut checked = 0usize;
        for cell in 0..GRID_CELLS {
            for (ty, cut) in digit_pairs {
                let a = Note::new(3.5, (cell % 4) as u8, (cell / 4) as u8, ty, cut).unwrap();
                let symbol = encode_timestamp_group(&[a]).unwrap();
                assert_eq!(decode_symbol(&symbol, 3.5).unwrap(), vec![a]);
                checked += 1;
            }
        }
        for first in 0..GRID_CELLS {
            for second in first + 1..GRID_CELLS {
                for (ty_a, cut_a) in digit_pairs {
                    for (ty_b, cut_b) in digit_pairs {
                        let a =
                            Note::new(1.0, (first % 4) as u8, (first / 4) as u8, ty_a, cut_a)
                                .unwrap();
                        let b =
                            Note::new(1.0, (second % 4) as u8, (second / 4) as u8, ty_b, cut_b)
                                .unwrap();
                        let symbol = encode_timestamp_group(&[a, b]).unwrap();
                        assert_eq!(symbol.as_str().len(), SYMBOL_LEN);
                        assert_eq!(decode_symbol(&symbol, 1.0).unwrap(), vec![a, b]);
                        checked += 1;
                    }
                }
            }
        }
        assert_eq!(checked, 12 * 5 + 66 * 25);
    }

    #[test]
    fn info_roundtrip_and_rank_table() {
        let info = InfoDocument {
            song_name: "Test Song".into(),
            song_sub_name: String::new(),
            song_author_name: "Artist".into(),
            level_author_name: "runesmith".into(),
            beats_per_minute: 120.0,
            song_filename: "song.ogg".into(),
            cover_image_filename: "cover.png".into(),
            difficulty_beatmap_sets: vec![BeatmapSet::with_defaults(Difficulty::Easy)],
        };
        let doc = serialize_info(&info).unwrap();
        assert!(doc.contains("\"_difficulty\":\"Easy\""), "{doc}");
        assert!(doc.contains("\"_difficultyRank\":1"), "{doc}");
        assert_eq!(parse_info(&doc).unwrap(), info);

        let ranks: Vec<u8> = Difficulty::ALL.iter().map(|d| d.rank()).collect();
        assert_eq!(ranks, vec![1, 3, 5, 7, 9]);
    }

    #[test]
    fn info_accepts_bare_field_names() {
        let doc = r#"{
            "songName": "A", "songSubName": "", "songAuthorName": "B",
            "levelAuthorName": "C", "beatsPerMinute": 120,
            "songFilename": "a.ogg", "coverImageFilename": "c.png",
            "difficultyBeatmapSets": []
        }"#;
        assert_eq!(parse_info(doc).unwrap().beats_per_minute, 120.0);
    }

    #[test]
    fn info_parse_errors() {
        let err = parse_info(r#"{"_songName": "A"}"#).unwrap_err();
        assert!(err.to_string().contains("_songSubName") || err.to_string().contains("field"));
        let doc = r#"{
            "_songName": "A", "_songSubName": "", "_songAuthorName": "B",
            "_levelAuthorName": "C", "_beatsPerMinute": 0,
            "_songFilename": "a.ogg", "_coverImageFilename": "c.png",
            "_difficultyBeatmapSets": []
        }"#;
        assert!(matches!(parse_info(doc), Err(CodecError::InvalidBpm(_))));
    }

    fn valid_map_strategy() -> impl Strategy<Value = DifficultyMap> {
        // Times on a half-beat grid keep groups exact; at most two distinct
        // cells per timestamp.
        prop::collection::btree_map(
            0u32..500,
            prop::collection::btree_set((0u8..4, 0u8..3), 1..=2),
            0..30,
        )
        .prop_map(|groups| {
            let mut notes = Vec::new();
            for (half_beats, cells) in groups {
                for (column, layer) in cells {
                    notes.push(Note::new(half_beats as f64 * 0.5, column, layer, 0, 1).unwrap());
                }
            }
            DifficultyMap::new(notes)
        })
    }

    proptest! {
        #[test]
        fn map_roundtrip(map in valid_map_strategy()) {
            let doc = serialize_difficulty_map(&map).unwrap();
            prop_assert_eq!(parse_difficulty_map(&doc).unwrap(), map);
        }

        #[test]
        fn group_roundtrip_random_digits(
            cells in prop::collection::btree_set((0u8..4, 0u8..3), 1..=2),
            digits in prop::collection::vec((0u8..10, 0u8..10), 2),
        ) {
            let notes: Vec<Note> = cells
                .iter()
                .zip(&digits)
                .map(|(&(column, layer), &(ty, cut))| Note::new(2.0, column, layer, ty, cut).unwrap())
                .collect();
            let symbol = encode_timestamp_group(&notes).unwrap();
            prop_assert_eq!(symbol.as_str().len(), SYMBOL_LEN);
            prop_assert_eq!(symbol.occupied_cells(), notes.len());
            let mut decoded = decode_symbol(&symbol, 2.0).unwrap();
            decoded.sort_by_key(Note::cell);
            let mut expected = notes.clone();
            expected.sort_by_key(Note::cell);
            prop_assert_eq!(decoded, expected);
        }
    }
}
