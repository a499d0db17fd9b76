use serde::{Deserialize, Serialize};

/// Maximum number of tags StackExchange allows on a question.
pub const MAX_TAGS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PostType {
    Question,
    Answer,
}

impl PostType {
    /// Maps the dump's `PostTypeId`; every other type (wiki, excerpt, ...) is `None`.
    pub fn from_type_id(id: u32) -> Option<Self> {
        match id {
            1 => Some(PostType::Question),
            2 => Some(PostType::Answer),
            _ => None,
        }
    }
}

/// One question or answer row from `Posts.xml`.
///
/// Questions carry a title and 1..=5 tags in the order the asker entered
/// them; answers carry a `parent_id` and no tags. `body` is stored as the raw
/// HTML from the dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub id: i64,
    pub post_type: PostType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<i64>,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub body: String,
    #[serde(default)]
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owner_id: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owner_display_name: Option<String>,
    #[serde(default)]
    pub score: i64,
    #[serde(default)]
    pub view_count: u64,
    #[serde(default)]
    pub answer_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted_answer_id: Option<i64>,
    pub creation_date: String,
}

impl Post {
    pub fn is_question(&self) -> bool {
        self.post_type == PostType::Question
    }

    /// Identity of the asker: user id when present, otherwise the display name.
    pub fn owner_key(&self) -> Option<OwnerKey<'_>> {
        match (self.owner_id, self.owner_display_name.as_deref()) {
            (Some(id), _) => Some(OwnerKey::Id(id)),
            (None, Some(name)) => Some(OwnerKey::Name(name)),
            (None, None) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OwnerKey<'a> {
    Id(i64),
    Name(&'a str),
}
