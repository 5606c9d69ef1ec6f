use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::npy::{self, ArrayData};
use crate::partition::{densify, ClassMap, LabelDictionary, Partition};

/// Reads raw integer labels from a 1-D `.npy` integer array or from a
/// headerless text file with one integer per line.
pub fn read_raw_labels(path: impl AsRef<Path>) -> Result<Vec<i64>> {
    let path = path.as_ref();
    let mut magic = [0u8; 6];
    let is_npy = File::open(path)
        .map_err(|e| Error::io(path, e))?
        .read(&mut magic)
        .map_err(|e| Error::io(path, e))?
        == 6
        && &magic == b"\x93NUMPY";
    let labels = if is_npy {
        let (header, data) = npy::read_array(path)?;
        if header.shape.len() != 1 {
            return Err(Error::format(path, format!("expected 1-D label array, found shape {:?}", header.shape)));
        }
        match data {
            ArrayData::I64(v) => v,
            _ => return Err(Error::format(path, format!("labels must be integers, found '{}'", header.dtype.descr()))),
        }
    } else {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut out = Vec::new();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            out.push(t.parse::<i64>().map_err(|_| {
                Error::format(path, format!("line {}: '{t}' is not an integer", n + 1))
            })?);
        }
        out
    };
    if labels.is_empty() {
        return Err(Error::format(path, "label file is empty"));
    }
    Ok(labels)
}

/// Reads labels and re-indexes them densely in ascending order of value.
pub fn read_labels(path: impl AsRef<Path>) -> Result<(Partition, LabelDictionary)> {
    densify(&read_raw_labels(path)?)
}

#[derive(Debug, serde::Deserialize)]
struct ClassRow {
    eval_class: i64,
    target_class: i64,
}

/// Reads an `eval_class,target_class` CSV.
pub fn read_class_table(path: impl AsRef<Path>) -> Result<Vec<(i64, i64)>> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::format(path, e.to_string()))?;
    let mut pairs = Vec::new();
    for row in rdr.deserialize::<ClassRow>() {
        let row = row.map_err(|e| Error::format(path, e.to_string()))?;
        pairs.push((row.eval_class, row.target_class));
    }
    if pairs.is_empty() {
        return Err(Error::format(path, "class table has no rows"));
    }
    Ok(pairs)
}

/// Writes a `cluster,class` CSV for auditing an assignment.
pub fn write_class_map(path: impl AsRef<Path>, map: &ClassMap) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let mut put = |rec: [String; 2]| w.write_record(&rec).map_err(|e| Error::format(path, e.to_string()));
    put(["cluster".into(), "class".into()])?;
    for (cluster, &class) in map.assignment().iter().enumerate() {
        put([cluster.to_string(), class.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::npy::write_array;

    #[test]
    fn npy_labels_are_densified() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.npy");
        write_array(&p, &[3], &[7i64, 7, 9]).unwrap();
        let (part, dict) = read_labels(&p).unwrap();
        assert_eq!(part.labels(), &[0, 0, 1]);
        assert_eq!(dict.originals(), &[7, 9]);
    }

    #[test]
    fn text_labels_use_sorted_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("l.txt");
        std::fs::write(&p, "3\n3\n1\n").unwrap();
        assert_eq!(read_labels(&p).unwrap().0.labels(), &[1, 1, 0]);
    }

    #[test]
    fn bad_label_files() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("e.txt");
        std::fs::write(&empty, "").unwrap();
        assert!(read_labels(&empty).is_err());
        let junk = dir.path().join("j.txt");
        std::fs::write(&junk, "1\nfoo\n").unwrap();
        assert!(read_labels(&junk).unwrap_err().to_string().contains("line 2"));
        let float = dir.path().join("f.npy");
        write_array(&float, &[2], &[1.0f64, 2.0]).unwrap();
        assert!(read_labels(&float).is_err());
        let two_d = dir.path().join("m.npy");
        write_array(&two_d, &[1, 2], &[1i64, 2]).unwrap();
        assert!(read_labels(&two_d).is_err());
    }

    #[test]
    fn class_table_and_map_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        std::fs::write(&p, "eval_class,target_class\n5,100\n5, 101\n6,200\n").unwrap();
        assert_eq!(read_class_table(&p).unwrap(), vec![(5, 100), (5, 101), (6, 200)]);
        std::fs::write(&p, "eval_class,target_class\n").unwrap();
        assert!(read_class_table(&p).is_err());
        let m = dir.path().join("map.csv");
        write_class_map(&m, &ClassMap::new(vec![1, 0, 1], 2).unwrap()).unwrap();
        assert_eq!(std::fs::read_to_string(&m).unwrap(), "cluster,class\n0,1\n1,0\n2,1\n");
    }
}
