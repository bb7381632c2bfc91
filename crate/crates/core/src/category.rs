//! Task categories and their collection prompts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{DatasetError, UnknownToken};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaskCategory {
    Mail,
    Greeting,
    Farewell,
    Groceries,
    Storytelling,
    Alarm,
    Announcement,
    Vacuum,
    AnswerDoor,
    TurnOnLights,
    Delivery,
    AskAboutDay,
    PhoneCall,
    Patrol,
    Find,
    Dust,
    Declutter,
    AnswerQuestion,
}

impl TaskCategory {
    pub const ALL: [TaskCategory; 18] = [
        TaskCategory::Mail,
        TaskCategory::Greeting,
        TaskCategory::Farewell,
        TaskCategory::Groceries,
        TaskCategory::Storytelling,
        TaskCategory::Alarm,
        TaskCategory::Announcement,
        TaskCategory::Vacuum,
        TaskCategory::AnswerDoor,
        TaskCategory::TurnOnLights,
        TaskCategory::Delivery,
        TaskCategory::AskAboutDay,
        TaskCategory::PhoneCall,
        TaskCategory::Patrol,
        TaskCategory::Find,
        TaskCategory::Dust,
        TaskCategory::Declutter,
        TaskCategory::AnswerQuestion,
    ];

    pub fn slug(self) -> &'static str {
        match self {
            TaskCategory::Mail => "mail",
            TaskCategory::Greeting => "greeting",
            TaskCategory::Farewell => "farewell",
            TaskCategory::Groceries => "groceries",
            TaskCategory::Storytelling => "storytelling",
            TaskCategory::Alarm => "alarm",
            TaskCategory::Announcement => "announcement",
            TaskCategory::Vacuum => "vacuum",
            TaskCategory::AnswerDoor => "answer_door",
            TaskCategory::TurnOnLights => "turn_on_lights",
            TaskCategory::Delivery => "delivery",
            TaskCategory::AskAboutDay => "ask_about_day",
            TaskCategory::PhoneCall => "phone_call",
            TaskCategory::Patrol => "patrol",
            TaskCategory::Find => "find",
            TaskCategory::Dust => "dust",
            TaskCategory::Declutter => "declutter",
            TaskCategory::AnswerQuestion => "answer_question",
        }
    }

    fn scenario(self) -> &'static str {
        match self {
            TaskCategory::Mail => {
                "The mail has just come through the slot in the front door. Starting from anywhere in the home, and without opening anything, what steps would you take to bring the mail in?"
            }
            TaskCategory::Greeting => {
                "A guest has just arrived and is standing inside the front door. What steps would you take to welcome them?"
            }
            TaskCategory::Farewell => {
                "A guest is getting ready to leave the home. What steps would you take to see them off?"
            }
            TaskCategory::Groceries => {
                "Several bags of groceries have been left by the front door. What steps would you take to put the groceries away?"
            }
            TaskCategory::Storytelling => {
                "A child in the home has asked to hear a story before bed. What steps would you take to tell them one?"
            }
            TaskCategory::Alarm => {
                "Someone in the home asked to be woken up at a certain time, and that time has come. What steps would you take to wake them?"
            }
            TaskCategory::Announcement => {
                "Dinner is ready and everyone in the home needs to know. What steps would you take to let them know?"
            }
            TaskCategory::Vacuum => {
                "The floors in the home are dirty. What steps would you take to vacuum them?"
            }
            TaskCategory::AnswerDoor => {
                "Someone just knocked on the front door. What steps would you take to answer it?"
            }
            TaskCategory::TurnOnLights => {
                "It is getting dark inside the home. What steps would you take to turn on the lights?"
            }
            TaskCategory::Delivery => {
                "Someone in the office asked you to bring them a package from the kitchen. What steps would you take to deliver it?"
            }
            TaskCategory::AskAboutDay => {
                "A member of the household just came home from work. What steps would you take to ask them about their day?"
            }
            TaskCategory::PhoneCall => {
                "The phone is ringing and the call is for someone else in the home. What steps would you take to handle the call?"
            }
            TaskCategory::Patrol => {
                "Everyone is away and the home needs to be checked on. What steps would you take to patrol the home?"
            }
            TaskCategory::Find => {
                "Someone in the home has lost their keys. What steps would you take to find them?"
            }
            TaskCategory::Dust => {
                "The furniture in the living room is dusty. What steps would you take to dust it?"
            }
            TaskCategory::Declutter => {
                "Items are scattered around the living room. What steps would you take to tidy it up?"
            }
            TaskCategory::AnswerQuestion => {
                "A guest has a question about the home. What steps would you take to answer it?"
            }
        }
    }
}

/// Sentence appended to every built-in prompt.
pub const PROMPT_CLOSING: &str = "There is no single right answer, so use your imagination based on your past experiences and list the steps that you yourself would take.";

impl FromStr for TaskCategory {
    type Err = UnknownToken;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskCategory::ALL
            .into_iter()
            .find(|c| c.slug() == s)
            .ok_or_else(|| UnknownToken::new("task category", s))
    }
}

impl fmt::Display for TaskCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl Serialize for TaskCategory {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.slug())
    }
}

impl<'de> Deserialize<'de> for TaskCategory {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A named region on the home layout with its hover text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutHint {
    pub region: String,
    pub tooltip: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryInfo {
    pub prompt_text: String,
    #[serde(default)]
    pub layout_hints: Vec<LayoutHint>,
}

/// Prompts for all 18 categories, keyed by slug.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    entries: BTreeMap<TaskCategory, CategoryInfo>,
}

fn default_layout() -> Vec<LayoutHint> {
    [
        ("front door", "Main entrance with a mail slot."),
        ("living room", "Couch, coffee table, and a television."),
        ("kitchen", "Counters, refrigerator, and a table."),
        ("office", "Desk, chair, and a phone."),
        ("bedroom", "Bed, dresser, and a closet."),
        ("bathroom", "Sink, shower, and a cabinet."),
        ("hallway", "Connects the bedroom, bathroom, and office."),
    ]
    .into_iter()
    .map(|(region, tooltip)| LayoutHint {
        region: region.to_owned(),
        tooltip: tooltip.to_owned(),
    })
    .collect()
}

impl Default for Catalog {
    fn default() -> Self {
        let layout = default_layout();
        let entries = TaskCategory::ALL
            .into_iter()
            .map(|c| {
                let info = CategoryInfo {
                    prompt_text: format!(
                        "Imagine that you live in the home shown in the layout. {} {}",
                        c.scenario(),
                        PROMPT_CLOSING
                    ),
                    layout_hints: layout.clone(),
                };
                (c, info)
            })
            .collect();
        Catalog { entries }
    }
}

impl Catalog {
    pub fn get(&self, category: TaskCategory) -> &CategoryInfo {
        // every constructor fills all 18 slugs
        &self.entries[&category]
    }

    pub fn iter(&self) -> impl Iterator<Item = (TaskCategory, &CategoryInfo)> {
        self.entries.iter().map(|(c, i)| (*c, i))
    }

    /// Parses a categories document mapping slug to prompt record. All 18
    /// slugs must be present exactly once.
    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        let raw: BTreeMap<String, CategoryInfo> =
            serde_json::from_str(text).map_err(|e| DatasetError::Categories(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for (slug, info) in raw {
            let cat: TaskCategory = slug
                .parse()
                .map_err(|e: UnknownToken| DatasetError::Categories(e.to_string()))?;
            entries.insert(cat, info);
        }
        if let Some(missing) = TaskCategory::ALL
            .iter()
            .find(|c| !entries.contains_key(*c))
        {
            return Err(DatasetError::Categories(format!(
                "missing category {missing:?}",
                missing = missing.slug()
            )));
        }
        Ok(Catalog { entries })
    }

    pub fn to_json(&self) -> String {
        let map: BTreeMap<&str, &CategoryInfo> =
            self.entries.iter().map(|(c, i)| (c.slug(), i)).collect();
        serde_json::to_string_pretty(&map).expect("catalog serializes")
    }
}
