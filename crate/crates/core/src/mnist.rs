//! IDX container parsing and MNIST loading.
//!
//! IDX files start with a big-endian magic word `0x0000TTNN` (`TT` = element
//! type, `NN` = number of dimensions), then one big-endian `u32` per
//! dimension, then the raw payload. Only unsigned-byte payloads (`TT = 0x08`)
//! are supported, which covers every MNIST file.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

pub const TRAIN_IMAGES: &str = "train-images-idx3-ubyte";
pub const TRAIN_LABELS: &str = "train-labels-idx1-ubyte";
pub const TEST_IMAGES: &str = "t10k-images-idx3-ubyte";
pub const TEST_LABELS: &str = "t10k-labels-idx1-ubyte";

const UBYTE: u8 = 0x08;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxTensor {
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

impl IdxTensor {
    pub fn magic(&self) -> u32 {
        ((UBYTE as u32) << 8) | self.dims.len() as u32
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 {
            return Err(Error::Truncated {
                expected: 4,
                actual: bytes.len(),
            });
        }
        let magic = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
        let ndim = bytes[3] as usize;
        if bytes[0] != 0 || bytes[1] != 0 || bytes[2] != UBYTE || ndim == 0 {
            return Err(Error::BadMagic {
                expected: ((UBYTE as u32) << 8) | ndim.max(1) as u32,
                found: magic,
            });
        }
        let header = 4 + 4 * ndim;
        if bytes.len() < header {
            return Err(Error::Truncated {
                expected: header,
                actual: bytes.len(),
            });
        }
        let dims: Vec<usize> = bytes[4..header]
            .chunks_exact(4)
            .map(|c| u32::from_be_bytes([c[0], c[1], c[2], c[3]]) as usize)
            .collect();
        let len = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or(Error::DimensionOverflow)?;
        let payload = &bytes[header..];
        if payload.len() < len {
            return Err(Error::Truncated {
                expected: len,
                actual: payload.len(),
            });
        }
        if payload.len() > len {
            return Err(Error::Validation(format!(
                "{} trailing bytes after IDX payload",
                payload.len() - len
            )));
        }
        Ok(IdxTensor {
            dims,
            data: payload.to_vec(),
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 4 * self.dims.len() + self.data.len());
        out.extend_from_slice(&self.magic().to_be_bytes());
        for &d in &self.dims {
            out.extend_from_slice(&(d as u32).to_be_bytes());
        }
        out.extend_from_slice(&self.data);
        out
    }
}

/// Read an IDX file and require a specific magic word.
pub fn parse_idx(path: impl AsRef<Path>, expected_magic: u32) -> Result<IdxTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() >= 4 {
        let found = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
        if found != expected_magic {
            return Err(Error::BadMagic {
                expected: expected_magic,
                found,
            });
        }
    }
    IdxTensor::decode(&bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

/// Images kept as raw bytes; [`Dataset::fill_input`] yields values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub split: Split,
    pixels_per_image: usize,
    pixels: Vec<u8>,
    labels: Vec<u8>,
}

impl Dataset {
    pub fn from_parts(
        split: Split,
        pixels_per_image: usize,
        pixels: Vec<u8>,
        labels: Vec<u8>,
    ) -> Result<Self> {
        if pixels_per_image == 0 || pixels.len() != pixels_per_image * labels.len() {
            return Err(Error::Validation(format!(
                "{} pixel bytes do not form {} images of {}",
                pixels.len(),
                labels.len(),
                pixels_per_image
            )));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l > 9) {
            return Err(Error::Validation(format!(
                "label {l} at index {i} is outside 0..=9"
            )));
        }
        Ok(Dataset {
            split,
            pixels_per_image,
            pixels,
            labels,
        })
    }

    pub fn from_idx(split: Split, images: IdxTensor, labels: IdxTensor) -> Result<Self> {
        if images.dims.len() != 3 {
            return Err(Error::Validation(format!(
                "image tensor has {} dims, expected 3",
                images.dims.len()
            )));
        }
        if labels.dims.len() != 1 {
            return Err(Error::Validation(format!(
                "label tensor has {} dims, expected 1",
                labels.dims.len()
            )));
        }
        if images.dims[0] != labels.dims[0] {
            return Err(Error::Validation(format!(
                "{} images but {} labels",
                images.dims[0], labels.dims[0]
            )));
        }
        Self::from_parts(
            split,
            images.dims[1] * images.dims[2],
            images.data,
            labels.data,
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn pixels_per_image(&self) -> usize {
        self.pixels_per_image
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn raw_image(&self, i: usize) -> &[u8] {
        &self.pixels[i * self.pixels_per_image..(i + 1) * self.pixels_per_image]
    }

    /// Scale image `i` to `[0, 1]` (pixel / 255) into `out`.
    pub fn fill_input(&self, i: usize, out: &mut [f64]) {
        for (o, &p) in out.iter_mut().zip(self.raw_image(i)) {
            *o = p as f64 / 255.0;
        }
    }

    /// First `n` examples.
    pub fn head(&self, n: usize) -> Dataset {
        let n = n.min(self.len());
        Dataset {
            split: self.split,
            pixels_per_image: self.pixels_per_image,
            pixels: self.pixels[..n * self.pixels_per_image].to_vec(),
            labels: self.labels[..n].to_vec(),
        }
    }

    pub fn to_idx(&self, side: usize) -> (IdxTensor, IdxTensor) {
        let other = self.pixels_per_image / side;
        (
            IdxTensor {
                dims: vec![self.len(), side, other],
                data: self.pixels.clone(),
            },
            IdxTensor {
                dims: vec![self.len()],
                data: self.labels.clone(),
            },
        )
    }
}

/// Load the four canonical MNIST files from `dir`.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<(Dataset, Dataset)> {
    let dir = dir.as_ref();
    let names = [TRAIN_IMAGES, TRAIN_LABELS, TEST_IMAGES, TEST_LABELS];
    let missing: Vec<String> = names
        .iter()
        .filter(|n| !dir.join(n).is_file())
        .map(|n| n.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingFiles {
            dir: dir.to_path_buf(),
            missing,
        });
    }
    let load = |img: &str, lab: &str, split| -> Result<Dataset> {
        let images = parse_idx(dir.join(img), IMAGE_MAGIC)?;
        let labels = parse_idx(dir.join(lab), LABEL_MAGIC)?;
        Dataset::from_idx(split, images, labels)
    };
    Ok((
        load(TRAIN_IMAGES, TRAIN_LABELS, Split::Train)?,
        load(TEST_IMAGES, TEST_LABELS, Split::Test)?,
    ))
}

/// Directory holding the MNIST files: `$MNIST_DIR` if set, else `data/mnist`
/// under the workspace root.
pub fn default_data_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os("MNIST_DIR") {
        return PathBuf::from(dir);
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn images(n: usize) -> IdxTensor {
        IdxTensor {
            dims: vec![n, 2, 3],
            data: (0..n * 6).map(|v| (v * 37 % 256) as u8).collect(),
        }
    }

    #[test]
    fn image_header_accepted() {
        let bytes = images(4).encode();
        assert_eq!(&bytes[..4], &[0, 0, 8, 3]);
        let t = IdxTensor::decode(&bytes).unwrap();
        assert_eq!(t.dims, vec![4, 2, 3]);
        assert_eq!(t.magic(), IMAGE_MAGIC);
    }

    #[test]
    fn label_magic_checked() {
        let dir = tempfile::tempdir().unwrap();
        let labels = IdxTensor {
            dims: vec![3],
            data: vec![1, 2, 3],
        };
        let p = dir.path().join("labels");
        fs::write(&p, labels.encode()).unwrap();
        assert_eq!(parse_idx(&p, LABEL_MAGIC).unwrap(), labels);

        let wrong = IdxTensor {
            dims: vec![3, 1],
            data: vec![1, 2, 3],
        };
        fs::write(&p, wrong.encode()).unwrap();
        assert!(matches!(
            parse_idx(&p, LABEL_MAGIC),
            Err(Error::BadMagic {
                expected: LABEL_MAGIC,
                found: 0x0802
            })
        ));
    }

    #[test]
    fn truncated_payload() {
        let mut bytes = images(2).encode();
        bytes.pop();
        assert!(matches!(
            IdxTensor::decode(&bytes),
            Err(Error::Truncated {
                expected: 12,
                actual: 11
            })
        ));
        assert!(matches!(
            IdxTensor::decode(&bytes[..6]),
            Err(Error::Truncated { .. })
        ));
    }

    #[test]
    fn dimension_overflow() {
        let mut bytes = vec![0, 0, 8, 4];
        for _ in 0..4 {
            bytes.extend_from_slice(&u32::MAX.to_be_bytes());
        }
        assert!(matches!(
            IdxTensor::decode(&bytes),
            Err(Error::DimensionOverflow)
        ));
    }

    #[test]
    fn non_byte_type_rejected() {
        let bytes = [0u8, 0, 0x0d, 1, 0, 0, 0, 0];
        assert!(matches!(
            IdxTensor::decode(&bytes),
            Err(Error::BadMagic { .. })
        ));
    }

    #[test]
    fn pixel_scaling() {
        let d = Dataset::from_parts(Split::Test, 3, vec![0, 255, 51], vec![7]).unwrap();
        let mut x = [9.0; 3];
        d.fill_input(0, &mut x);
        assert_eq!(x, [0.0, 1.0, 0.2]);
    }

    #[test]
    fn bad_label_rejected() {
        assert!(matches!(
            Dataset::from_parts(Split::Train, 1, vec![0, 0], vec![3, 10]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn missing_files_listed() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join(TRAIN_LABELS),
            IdxTensor {
                dims: vec![0],
                data: vec![],
            }
            .encode(),
        )
        .unwrap();
        match load_dataset(dir.path()) {
            Err(Error::MissingFiles { missing, .. }) => {
                assert_eq!(
                    missing,
                    vec![
                        TRAIN_IMAGES.to_string(),
                        TEST_IMAGES.to_string(),
                        TEST_LABELS.to_string()
                    ]
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
