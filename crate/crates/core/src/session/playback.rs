//! Playback state machine and the sample-exact player behind audio streams.

use serde::{Deserialize, Serialize};

use super::ServiceError;
use crate::tts::synth::{check_rate, check_volume, ms_to_samples, plan_sentence, quantize, render_sentence};
use crate::tts::{sentence_phonemes, voice, Phoneme, SynthesisParams, VoiceProfile, SAMPLE_RATE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlaybackState {
    Idle,
    Playing,
    Paused,
    Stopped,
}

impl PlaybackState {
    pub const ALL: [PlaybackState; 4] =
        [PlaybackState::Idle, PlaybackState::Playing, PlaybackState::Paused, PlaybackState::Stopped];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Play,
    Pause,
    Resume,
    Stop,
}

impl Command {
    pub const ALL: [Command; 4] = [Command::Play, Command::Pause, Command::Resume, Command::Stop];
}

/// The complete transition table; `None` means the command is rejected.
pub fn transition(state: PlaybackState, cmd: Command) -> Option<PlaybackState> {
    use Command::*;
    use PlaybackState::*;
    match (state, cmd) {
        (Idle | Stopped, Play) => Some(Playing),
        (Playing, Pause) => Some(Paused),
        (Paused, Resume) => Some(Playing),
        (Playing | Paused, Stop) => Some(Stopped),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Position {
    pub sentence_index: usize,
    /// Samples into the current sentence clip, trailing pause included.
    pub sample_offset: usize,
}

/// Per-sentence phonemes of a document. A sentence clip carries the
/// inter-sentence pause when a later sentence has anything to say.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeechPlan {
    pub phonemes: Vec<Vec<Phoneme>>,
    pub pause_after: Vec<bool>,
}

impl SpeechPlan {
    pub fn new(sentences: &[String]) -> Self {
        let phonemes: Vec<Vec<Phoneme>> = sentences.iter().map(|s| sentence_phonemes(s).0).collect();
        let mut pause_after = vec![false; phonemes.len()];
        let mut later = false;
        for i in (0..phonemes.len()).rev() {
            pause_after[i] = later && !phonemes[i].is_empty();
            later |= !phonemes[i].is_empty();
        }
        SpeechPlan { phonemes, pause_after }
    }

    pub fn len(&self) -> usize {
        self.phonemes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phonemes.is_empty()
    }

    pub fn pause_samples(rate: f64) -> usize {
        ms_to_samples(crate::tts::synth::INTER_SENTENCE_PAUSE_MS / rate, SAMPLE_RATE)
    }

    pub fn clip_len(&self, i: usize, voice: &VoiceProfile, rate: f64) -> usize {
        let speech: usize = plan_sentence(&self.phonemes[i], voice, rate, 1.0)
            .iter()
            .map(|e| ms_to_samples(e.duration_ms, SAMPLE_RATE))
            .sum();
        speech + if self.pause_after[i] { Self::pause_samples(rate) } else { 0 }
    }

    /// Unit-volume samples of sentence `i` followed by its pause.
    pub fn render(&self, i: usize, voice: &VoiceProfile, rate: f64) -> Vec<f64> {
        let events = plan_sentence(&self.phonemes[i], voice, rate, 1.0);
        let mut out = render_sentence(&events, voice, SAMPLE_RATE);
        if self.pause_after[i] {
            out.resize(out.len() + Self::pause_samples(rate), 0.0);
        }
        out
    }
}

#[derive(Debug, Clone)]
struct Clip {
    index: usize,
    unit: Vec<f64>,
}

/// Snapshot served by the API.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionView {
    pub id: String,
    pub document_id: String,
    pub state: PlaybackState,
    pub position: Position,
    pub params: SynthesisParams,
    pub sentence_count: usize,
}

#[derive(Debug)]
pub struct PlaybackSession {
    pub id: String,
    pub document_id: String,
    params: SynthesisParams,
    voice: &'static VoiceProfile,
    state: PlaybackState,
    position: Position,
    plan: SpeechPlan,
    /// The sentence being played, rendered at the rate it started with.
    clip: Option<Clip>,
}

impl PlaybackSession {
    pub fn new(
        id: impl Into<String>,
        document_id: impl Into<String>,
        sentences: &[String],
        params: SynthesisParams,
    ) -> Result<Self, ServiceError> {
        params.validate()?;
        let voice = voice(&params.voice)?;
        if sentences.is_empty() {
            return Err(ServiceError::EmptyDocument);
        }
        Ok(PlaybackSession {
            id: id.into(),
            document_id: document_id.into(),
            params,
            voice,
            state: PlaybackState::Idle,
            position: Position::default(),
            plan: SpeechPlan::new(sentences),
            clip: None,
        })
    }

    pub fn state(&self) -> PlaybackState {
        self.state
    }

    pub fn position(&self) -> Position {
        self.position
    }

    pub fn params(&self) -> &SynthesisParams {
        &self.params
    }

    pub fn view(&self) -> SessionView {
        SessionView {
            id: self.id.clone(),
            document_id: self.document_id.clone(),
            state: self.state,
            position: self.position,
            params: self.params.clone(),
            sentence_count: self.plan.len(),
        }
    }

    /// Rejected commands leave the session untouched.
    pub fn command(&mut self, cmd: Command) -> Result<PlaybackState, ServiceError> {
        let next = transition(self.state, cmd)
            .ok_or(ServiceError::InvalidTransition { state: self.state, cmd })?;
        match cmd {
            Command::Play | Command::Stop => {
                self.position = Position::default();
                self.clip = None;
            }
            Command::Pause | Command::Resume => {}
        }
        self.state = next;
        Ok(next)
    }

    /// Volume applies from the next sample. Rate applies from the next
    /// sentence; while paused the paused sentence restarts at the new rate.
    pub fn set_params(&mut self, rate: Option<f64>, volume: Option<f64>) -> Result<&SynthesisParams, ServiceError> {
        if let Some(r) = rate {
            check_rate(r)?;
        }
        if let Some(v) = volume {
            check_volume(v)?;
        }
        if let Some(r) = rate {
            if r != self.params.rate {
                self.params.rate = r;
                if self.state == PlaybackState::Paused {
                    self.position.sample_offset = 0;
                    self.clip = None;
                }
            }
        }
        if let Some(v) = volume {
            self.params.volume = v;
        }
        Ok(&self.params)
    }

    fn current_len(&self) -> usize {
        match &self.clip {
            Some(c) if c.index == self.position.sentence_index => c.unit.len(),
            _ => self.plan.clip_len(self.position.sentence_index, self.voice, self.params.rate),
        }
    }

    /// Samples left from the current position under the current parameters.
    pub fn remaining_samples(&self) -> usize {
        let i = self.position.sentence_index;
        if self.state == PlaybackState::Stopped || i >= self.plan.len() {
            return 0;
        }
        let rest: usize = (i + 1..self.plan.len()).map(|j| self.plan.clip_len(j, self.voice, self.params.rate)).sum();
        self.current_len().saturating_sub(self.position.sample_offset) + rest
    }

    /// Steps over exhausted and empty clips; reaching the end stops playback.
    fn settle(&mut self) {
        while self.position.sentence_index < self.plan.len() && self.position.sample_offset >= self.current_len() {
            self.position = Position { sentence_index: self.position.sentence_index + 1, sample_offset: 0 };
        }
        if self.position.sentence_index >= self.plan.len() {
            self.state = PlaybackState::Stopped;
            self.clip = None;
        }
    }

    /// Up to `max` further samples. Reading the final sample stops playback.
    pub fn read(&mut self, max: usize) -> Result<Vec<i16>, ServiceError> {
        if self.state != PlaybackState::Playing {
            return Err(ServiceError::NotPlaying(self.state));
        }
        self.settle();
        let mut out = Vec::new();
        while out.len() < max && self.state == PlaybackState::Playing {
            let i = self.position.sentence_index;
            if self.clip.as_ref().is_none_or(|c| c.index != i) {
                self.clip = Some(Clip { index: i, unit: self.plan.render(i, self.voice, self.params.rate) });
            }
            let unit = &self.clip.as_ref().expect("clip rendered").unit;
            let from = self.position.sample_offset;
            let to = unit.len().min(from + max - out.len());
            let gain = self.params.volume;
            out.extend(unit[from..to].iter().map(|&x| quantize(x, gain)));
            self.position.sample_offset = to;
            self.settle();
        }
        Ok(out)
    }
}
