#include "adw/workload.hpp"

namespace adw {

using sql::Command;

std::vector<Command> group_commands(int group) {
  using C = Command;
  switch (group) {
    case 1: return {C::Where};
    case 2: return {C::Where, C::GroupBy};
    case 3: return {C::Where, C::OuterJoin};
    case 4: return {C::Where, C::Union};
    case 5: return {C::Where, C::OrderBy};
    case 6: return {C::Where, C::OuterJoin, C::OrderBy};
    case 7: return {C::Where, C::GroupBy, C::Having};
    case 8: return {C::Where, C::GroupBy, C::Having, C::OrderBy};
    case 9: return {C::Where, C::GroupBy, C::Having, C::OuterJoin, C::OrderBy};
    case 10: return {C::Where, C::GroupBy, C::Having, C::Union, C::OrderBy};
    default: return {};
  }
}

namespace {

struct Entry {
  int number;
  const char* sql;
  const char* note;
};

// clang-format off
const Entry kQueries[] = {
  // G1: Where
  {1, R"(SELECT FieldFactID, Yield, PestNumber
FROM FieldFact
WHERE PestNumber = 20 AND Yield > 14)", ""},
  {2, R"(SELECT fieldfact.FieldFactID, soil.PH, soil.TextureLabel
FROM fieldfact, soil
WHERE fieldfact.SoildID = soil.SoilID AND soil.PH >= 8.2 AND fieldfact.SprayQuantity = 1)", ""},
  {3, R"(SELECT orderfact.OrderID, product.ProductName, orderfact.Price
FROM orderfact, product, supplier
WHERE orderfact.ProductID = product.ProductID AND orderfact.SupplierID = supplier.SupplierID
  AND supplier.SupplierName = 'Farm Direct' AND orderfact.Quantity >= 19)", ""},
  {4, R"(SELECT salefact.SaleID, crop.CropName, salefact.Quantity
FROM salefact, crop, business
WHERE salefact.CropID = crop.CropID AND salefact.BusinessID = business.BusinessID
  AND business.BusinessName = 'Ori Agro' AND salefact.Quantity > 45)", ""},
  {5, R"(SELECT fieldfact.FieldID, crop.cropname,
       fieldfact.yield
FROM fieldfact, crop
WHERE fieldfact.cropid = crop.cropid and
      SprayQuantity = 7 and
      (crop.CropName like 'P%' or
       crop.CropName like 'R%' or
       crop.CropName like 'G%'))", "typeset escapes removed from the LIKE patterns"},

  // G2: Where, Group by
  {6, R"(SELECT crop.CropName, SUM(fieldfact.Yield), COUNT(*)
FROM fieldfact, crop
WHERE fieldfact.CropID = crop.CropID AND fieldfact.PestNumber < 5
GROUP BY crop.CropName)", ""},
  {7, R"(SELECT operationtime.Season, MAX(fieldfact.Yield)
FROM fieldfact, operationtime
WHERE fieldfact.OperationTimeID = operationtime.OperationTimeID AND fieldfact.SprayQuantity >= 5
GROUP BY operationtime.Season)", ""},
  {8, R"(SELECT fertiliser.FertiliserName, SUM(fieldfact.FertiliserQuantity)
FROM fieldfact, fertiliser
WHERE fieldfact.FertiliserID = fertiliser.FertiliserID AND fieldfact.Yield > 10
GROUP BY fertiliser.FertiliserName)", ""},
  {9, R"(SELECT supplier.SupplierName, SUM(orderfact.Quantity), COUNT(*)
FROM orderfact, supplier
WHERE orderfact.SupplierID = supplier.SupplierID AND orderfact.Price > 250
GROUP BY supplier.SupplierName)", ""},
  {10, R"(SELECT soil.PH, count(*)
FROM fieldfact, soil
WHERE fieldfact.SoildID = soil.SoilID and
      fieldfact.sprayquantity = 2
GROUP by soil.PH)", ""},

  // G3: Where, Left (right) Join
  {11, R"(SELECT crop.CropName, inspection.Description
FROM crop LEFT JOIN inspection ON crop.CropID = inspection.CropID
WHERE crop.EstYield > 5)", ""},
  {12, R"(SELECT fieldfact.FieldFactID, pest.CommonName
FROM fieldfact LEFT JOIN pest ON fieldfact.PestID = pest.PestID
WHERE fieldfact.PestNumber = 13 AND fieldfact.SprayQuantity = 4)", ""},
  {13, R"(SELECT farmer.FarmerName, site.SiteName
FROM farmer LEFT JOIN site ON farmer.FarmerID = site.FarmerID
WHERE farmer.FarmerID <= 30)", ""},
  {14, R"(SELECT weatherstation.StationName, weatherreading.Rainfall
FROM weatherstation LEFT JOIN weatherreading
  ON weatherstation.WeatherStationID = weatherreading.WeatherStationID
WHERE weatherreading.Rainfall > 48)", ""},
  {15, R"(SELECT fieldfact.yield,
       fertiliser.fertiliserName,
       fertiliser.fertiliserGroupName
FROM fieldfact
RIGHT JOIN fertiliser on
     fieldfact.fertiliserID = fertiliser.fertiliserID
WHERE fieldfact.fertiliserQuantity = 10 and
      fertiliser.fertiliserName like '%N%')", "truncated LIKE literal reconstructed as '%N%'"},

  // G4: Where, Union
  {16, R"(SELECT cropname FROM crop WHERE EstYield > 12
UNION
SELECT crop.CropName FROM salefact, crop
WHERE salefact.CropID = crop.CropID AND salefact.Price > 299)", ""},
  {17, R"(SELECT FertiliserName AS name FROM fertiliser WHERE FertiliserGroupName = 'Nitrogen'
UNION
SELECT NutrientName FROM nutrient WHERE Quantity > 8)", ""},
  {18, R"(SELECT fieldfact.FieldID FROM fieldfact WHERE fieldfact.Yield > 14.9
UNION
SELECT field.FieldID FROM field WHERE field.FieldArea > 49.5)", ""},
  {19, R"(SELECT farmer.FarmerName FROM orderfact, farmer
WHERE orderfact.FarmerID = farmer.FarmerID AND orderfact.Quantity = 20 AND orderfact.Price > 490
UNION
SELECT farmer.FarmerName FROM salefact, farmer
WHERE salefact.FarmerID = farmer.FarmerID AND salefact.Quantity = 50)", ""},
  {20, R"(SELECT sprayproductname
FROM fieldfact, spray
WHERE fieldfact.sprayid = spray.sprayid and
      fieldfact.watervolumn > 5 and
      fieldfact.watervolumn < 20
UNION
SELECT productname
FROM product, orderfact
WHERE product.ProductID = orderfact.ProductID
      and (orderfact.Quantity = 5 or
           orderfact.Quantity = 6))", ""},

  // G5: Where, Order by
  {21, R"(SELECT fieldfact.FieldFactID, fieldfact.Yield FROM fieldfact
WHERE fieldfact.Yield > 14.8
ORDER BY fieldfact.Yield DESC)", ""},
  {22, R"(SELECT crop.CropName, crop.EstYield FROM crop
WHERE crop.EstYield >= 7
ORDER BY crop.EstYield DESC, crop.CropName)", ""},
  {23, R"(SELECT orderfact.OrderID, transtime.OrderDate, orderfact.Price
FROM orderfact, transtime
WHERE orderfact.TransTimeID = transtime.TransTimeID AND transtime.Season = 'Winter' AND orderfact.Quantity = 1
ORDER BY transtime.OrderDate)", ""},
  {24, R"(SELECT salefact.SaleID, salefact.SaleDate, farmer.FarmerName
FROM salefact, farmer
WHERE salefact.FarmerID = farmer.FarmerID AND YEAR(salefact.SaleDate) = 2017 AND salefact.Quantity > 48
ORDER BY salefact.SaleDate DESC)", ""},
  {25, R"(SELECT fieldfact.fieldID, field.FieldName,
       field.FieldGPS, spray.SprayProductName
FROM fieldfact, field, spray
WHERE fieldfact.FieldID = field.FieldID and
      fieldfact.SprayID = spray.SprayID and
      fieldfact.PestNumber = 6
ORDER BY field.FieldName)", ""},

  // G6: Where, Left (right) Join, Order by
  {26, R"(SELECT crop.CropName, cropstate.Height
FROM crop LEFT JOIN cropstate ON crop.CropID = cropstate.CropID
WHERE crop.BbchScale > 50
ORDER BY crop.CropName)", ""},
  {27, R"(SELECT fieldfact.FieldFactID, treatment.TreatmentName
FROM fieldfact LEFT JOIN treatment ON fieldfact.TreatmentID = treatment.TreatmentID
WHERE fieldfact.Yield > 14.5 AND fieldfact.PestNumber > 15
ORDER BY fieldfact.FieldFactID)", ""},
  {28, R"(SELECT site.SiteName, field.FieldName
FROM site LEFT JOIN field ON site.SiteID = field.SiteID
WHERE site.Country = 'Ireland'
ORDER BY site.SiteName, field.FieldName)", ""},
  {29, R"(SELECT spray.SprayProductName, fieldfact.Yield
FROM fieldfact RIGHT JOIN spray ON fieldfact.SprayID = spray.SprayID
WHERE fieldfact.WaterVolumn > 29.5
ORDER BY spray.SprayProductName)", ""},
  {30, R"(SELECT fieldfact.FieldID, nutrient.NutrientName,
       nutrient.Quantity, nutrient.`Year`
FROM fieldfact
RIGHT JOIN nutrient on
     fieldfact.NutrientID = nutrient.NutrientID
WHERE fieldfact.NutrientQuantity = 3 and
      fieldfact.fertiliserquantity = 3
ORDER BY nutrient.NutrientName
LIMIT 10000)", ""},

  // G7: Where, Group by, Having
  {31, R"(SELECT crop.CropName, COUNT(*) AS n
FROM fieldfact, crop
WHERE fieldfact.CropID = crop.CropID AND fieldfact.Yield > 7
GROUP BY crop.CropName
HAVING n > 100)", ""},
  {32, R"(SELECT soil.TextureLabel, SUM(fieldfact.NutrientQuantity) AS total
FROM fieldfact, soil
WHERE fieldfact.SoildID = soil.SoilID AND soil.PH < 6
GROUP BY soil.TextureLabel
HAVING total > 50)", ""},
  {33, R"(SELECT pest.CommonName, MAX(fieldfact.PestNumber) AS worst
FROM fieldfact, pest
WHERE fieldfact.PestID = pest.PestID AND fieldfact.SprayQuantity = 0
GROUP BY pest.CommonName
HAVING worst >= 20)", ""},
  {34, R"(SELECT product.ProductName, SUM(orderfact.Price) AS spend
FROM orderfact, product
WHERE orderfact.ProductID = product.ProductID AND orderfact.Quantity > 10
GROUP BY product.ProductName
HAVING spend > 1000)", ""},
  {35, R"(SELECT crop.cropname,
       sum(fieldfact.watervolumn) as sum1
FROM fieldfact, crop
WHERE fieldfact.cropid = crop.cropid and
      fieldfact.sprayquantity = 8 and
      crop.EstYield >= 1 and crop.EstYield <=10
GROUP BY crop.cropname
HAVING sum1 > 100)", ""},

  // G8: Where, Group by, Having, Order by
  {36, R"(SELECT operationtime.Season, SUM(fieldfact.Yield) AS y
FROM fieldfact, operationtime
WHERE fieldfact.OperationTimeID = operationtime.OperationTimeID AND fieldfact.PestNumber > 10
GROUP BY operationtime.Season
HAVING y > 100
ORDER BY y DESC)", ""},
  {37, R"(SELECT fertiliser.FertiliserGroupName, COUNT(*) AS uses
FROM fieldfact, fertiliser
WHERE fieldfact.FertiliserID = fertiliser.FertiliserID AND fieldfact.FertiliserQuantity >= 15
GROUP BY fertiliser.FertiliserGroupName
HAVING uses > 10
ORDER BY fertiliser.FertiliserGroupName)", ""},
  {38, R"(SELECT business.BusinessName, SUM(salefact.Quantity) AS sold
FROM salefact, business
WHERE salefact.BusinessID = business.BusinessID AND YEAR(salefact.SaleDate) = 2016
GROUP BY business.BusinessName
HAVING sold > 100
ORDER BY sold DESC)", ""},
  {39, R"(SELECT crop.CropName, MAX(fieldfact.WaterVolumn) AS peak
FROM fieldfact, crop
WHERE fieldfact.CropID = crop.CropID AND fieldfact.NutrientQuantity = 10
GROUP BY crop.CropName
HAVING peak > 25
ORDER BY crop.CropName)", ""},
  {40, R"(SELECT crop.cropname,
       sum(fieldfact.fertiliserquantity) as sum1
FROM fieldfact, crop
WHERE fieldfact.cropid = crop.cropid and
      fieldfact.nutrientquantity= 5 and
      crop.EstYield <=1
GROUP by crop.cropname
HAVING sum1 > 30
ORDER BY crop.cropname)", ""},

  // G9: Where, Group by, Having, Left (right) Join, Order by
  {41, R"(SELECT crop.CropName, COUNT(inspection.InspectionID) AS n
FROM crop LEFT JOIN inspection ON crop.CropID = inspection.CropID
WHERE crop.EstYield >= 0
GROUP BY crop.CropName
HAVING n >= 0
ORDER BY crop.CropName)", ""},
  {42, R"(SELECT pest.PestType, SUM(fieldfact.PestNumber) AS pests
FROM fieldfact LEFT JOIN pest ON fieldfact.PestID = pest.PestID
WHERE fieldfact.Yield < 2
GROUP BY pest.PestType
HAVING pests > 10
ORDER BY pest.PestType)", ""},
  {43, R"(SELECT farmer.FarmerName, COUNT(site.SiteID) AS sites
FROM farmer LEFT JOIN site ON farmer.FarmerID = site.FarmerID
WHERE farmer.FarmerID > 0
GROUP BY farmer.FarmerName
HAVING sites < 3
ORDER BY farmer.FarmerName)", ""},
  {44, R"(SELECT treatment.Type, SUM(fieldfact.Yield) AS y
FROM fieldfact LEFT JOIN treatment ON fieldfact.TreatmentID = treatment.TreatmentID
WHERE fieldfact.SprayQuantity = 9
GROUP BY treatment.Type
HAVING y > 50
ORDER BY y)", ""},
  {45, R"(SELECT nutrient.NutrientName,
       sum(nutrient.Quantity) as sum1
FROM fieldfact
LEFT JOIN nutrient on
    fieldfact.NutrientID = nutrient.NutrientID
WHERE nutrient.nutrientName like '%N%' and
     (fieldfact.pestnumber = 16 or
      fieldfact.pestnumber = 15)
GROUP by nutrient.NutrientName
HAVING sum1 <300
ORDER BY nutrient.NutrientName)", "truncated LIKE literal reconstructed as '%N%' followed by 'and'"},

  // G10: Where, Group by, Having, Union, Order by
  {46, R"(SELECT crop.CropName AS name, SUM(fieldfact.Yield) AS total
FROM fieldfact, crop
WHERE fieldfact.CropID = crop.CropID AND fieldfact.PestNumber = 0
GROUP BY crop.CropName
HAVING total > 10
UNION
SELECT crop.CropName, SUM(salefact.Quantity)
FROM salefact, crop
WHERE salefact.CropID = crop.CropID AND salefact.Price < 110
GROUP BY crop.CropName
HAVING SUM(salefact.Quantity) > 10
ORDER BY name)", ""},
  {47, R"(SELECT farmer.FarmerName AS who, COUNT(*) AS n
FROM orderfact, farmer
WHERE orderfact.FarmerID = farmer.FarmerID AND orderfact.Quantity > 18
GROUP BY farmer.FarmerName
HAVING n > 1
UNION
SELECT farmer.FarmerName, COUNT(*)
FROM salefact, farmer
WHERE salefact.FarmerID = farmer.FarmerID AND salefact.Quantity > 45
GROUP BY farmer.FarmerName
HAVING COUNT(*) > 1
ORDER BY who)", ""},
  {48, R"(SELECT operationtime.Season AS season, MAX(fieldfact.Yield) AS best
FROM fieldfact, operationtime
WHERE fieldfact.OperationTimeID = operationtime.OperationTimeID AND fieldfact.SprayQuantity = 3
GROUP BY operationtime.Season
HAVING best > 1
UNION
SELECT transtime.Season, MAX(orderfact.Price)
FROM orderfact, transtime
WHERE orderfact.TransTimeID = transtime.TransTimeID AND orderfact.Quantity = 3
GROUP BY transtime.Season
HAVING MAX(orderfact.Price) > 1
ORDER BY season, best)", ""},
  {49, R"(SELECT pest.CommonName AS name1, SUM(fieldfact.PestNumber) AS sum1
FROM fieldfact, pest
WHERE fieldfact.PestID = pest.PestID AND fieldfact.Yield > 13
GROUP BY pest.CommonName
HAVING sum1 > 100
UNION
SELECT nutrient.NutrientName, SUM(fieldfact.NutrientQuantity) AS sum2
FROM fieldfact, nutrient
WHERE fieldfact.NutrientID = nutrient.NutrientID AND fieldfact.Yield > 13
GROUP BY nutrient.NutrientName
HAVING sum2 > 100
ORDER BY name1)", ""},
  {50, R"(SELECT sprayproductname as name1,
       sum(fieldfact.watervolumn) as sum1
FROM fieldfact, spray
WHERE fieldfact.sprayid = spray.sprayid and
      fieldfact.Yield > 4 and fieldfact.Yield < 8
GROUP by sprayproductname
HAVING sum1 > 210
UNION
SELECT productname as name1,
       sum(orderfact.Quantity) as sum2
FROM product, orderfact
WHERE product.ProductID = orderfact.ProductID and
     (orderfact.Quantity = 5 or
      orderfact.Quantity = 6)
GROUP by productname
HAVING sum2 > 50
ORDER BY name1)", ""},
};
// clang-format on

}  // namespace

const std::vector<WorkloadQuery>& builtin_workload() {
  static const std::vector<WorkloadQuery> queries = [] {
    std::vector<WorkloadQuery> out;
    for (const auto& e : kQueries) {
      WorkloadQuery q;
      q.number = e.number;
      q.id = "q" + std::to_string(e.number);
      q.group = (e.number - 1) / 5 + 1;
      q.sql = e.sql;
      q.representative = e.number % 5 == 0;
      q.note = e.note;
      out.push_back(std::move(q));
    }
    return out;
  }();
  return queries;
}

const std::vector<CorpusQuery>& decision_examples() {
  static const std::vector<CorpusQuery> examples = {
      {"example1", R"(select CR.CropName, FI.FieldName, FF.Yield,
       PE.CommonName, FF.PestNumber, PE.Description
from FieldFact FF, Crop CR, Field FI, Pest PE,
     Fertiliser FE, Inspection INS, OperationTime OP
where FF.CropID = CR.CropID and
      FF.FieldID = FI.FieldID and
      FF.PestID = PE.PestID and
      FF.FertiliserID = FE.FertiliserID and
      CR.CropID = INS.CropID and
      FF.OperationTimeID = OP.OperationTimeID and
      FE.FertiliserName <> 'urea' and
      (INS.Description = 'Yellow Rust' or
             INS.Description = 'Brown Rust') and
      Year(INS.Date) = '2015' and
      Year(OP.StartDate) = '2015' and
      Year(OP.EndDate) = '2015')",
       "fields and crops grown in 2015 without urea whose crops had yellow or brown rust"},
      {"example2", R"(select FA.FarmerID, FA.FarmerName, CR.CropName,
       SF.Unit, SUM(SF.Quantity)
from Salefact SF, business BU, farmer FA, crop CR
where SF.BusinessID = BU.BusinessID and
      SF.FarmerID = FA.FarmerID and
      SF.CropID = CR.CropID and
      Month(SF.SaleDate) = '08' and
      Year(SF.SaleDate) = '2016' and
      BU.BusinessName = 'Ori Agro'
group by CR.CropName)",
       "crop quantities sold by farmers to Ori Agro in August 2016"},
      {"example3", R"(Select CR.CropName, FE.FertiliserName,
       FF.FertiliserQuantity, TR.TreatmentName,
       TR.Rate, TR.TreatmentComment
From FieldFact FF, Crop CR, OperationTime OT,
     Soil SO, PEST PE, Fertiliser FE, Treatment TR
Where FF.CropID = CR.CropID and
      FF.OperationTimeID = OT.OperationTimeID and
      FF.SoildID = SO.SoilID and
      FF.PestID = PE.PestID and
      FF.FertiliserID = FE.FertiliserID and
      FF.TreatmentID = TR.TreatmentID and
      Year(OT.StartDate) = '2017' and
      Year(OT.EndDate) = '2017' and
      FF.Yield > 10 and
      SO.PH > 6 and SO.Silt <= 50 and
      PE.CommonName = 'Black twitch')",
       "fertiliser and treatment of high-yield 2017 crops hit by black twitch on suitable soil"},
      {"example4", R"(Select FI.FieldName, SI.SiteName, FA.FarmerName,
       CR.CropName, FE.FertiliserName,
       FF.FertiliserQuantity, FE.Unit, OT.StartDate
From FieldFact FF, Crop CR, Field FI, Site SI,
     Farmer FA, Fertiliser FE, Operationtime OT
Where FF.CropID = CR.CropID and
      FF.FieldID = FI.FieldID and
      FF.FertiliserID = FE.FertiliserID and
      FF.OperationTimeID = OT.OperationTimeID and
      FI.SiteID = SI.SiteID and
      SI.FarmerID = FA.FarmerID and
      OT.Season = 'Spring' and
      YEAR(OT.StartDate) = '2017' and
      FA.FarmerID IN(
       Select FarmerID
       From
       (Select SI.FarmerID as FarmerID,
         SUM(FF.FertiliserQuantity) as SumFertiliser
        From FieldFact FF, Field FI, Site SI,
             Fertiliser FE, OperationTime OT
        Where FF.FieldID = FI.FieldID and
              FF.FertiliserID = FE.FertiliserID and
              FF.OperationTimeID =
                             OT.OperationTimeID and
              SI.SiteID = FI.SiteID and
              FE.FertiliserName = 'SO3' and
              OT.Season = 'Spring' and
              YEAR(OT.StartDate) = '2016'
         Group by SI.FarmerID
         Order by SumFertiliser DESC
         Limit 10
        )AS Table1
      ))",
       "spring 2017 fertiliser use of the ten farmers that applied the most SO3 in spring 2016"},
  };
  return examples;
}

std::vector<std::pair<std::string, std::string>> corpus_queries() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& q : builtin_workload()) {
    if (q.representative) out.emplace_back(q.id, q.sql);
  }
  for (const auto& e : decision_examples()) out.emplace_back(e.name, e.sql);
  return out;
}

}  // namespace adw
