pub mod doc;
pub mod ocr;
pub mod text;
pub mod accuracy;
pub mod tts;
pub mod ingest;
pub mod session;
